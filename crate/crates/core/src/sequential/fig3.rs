use serde::{Deserialize, Serialize};

use super::{alice1_asc_closed, alice2_asc_closed, simulate_chain, AliceSharpness, InputBias};
use crate::coherence::CoherenceMetric;
use crate::error::Result;
use crate::measurement::PointerSetting;
use crate::mub::build_mub;
use crate::naqc::optimizer::OptimizerOptions;
use crate::naqc::roots::illinois;
use crate::naqc::{
    cost_matrix, critical_sharpness, ensembles_from_projections, permuted_from_cost, projections, threshold,
};
use crate::qcore::{max_entangled_state, primes_up_to, PrimeDim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig3Mode {
    Unsharp,
    Pointer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig3Row {
    pub d: usize,
    /// Alice1's sharpness (unsharp mode) or pointer precision (pointer mode).
    pub lambda1: f64,
    pub asc1: f64,
    pub asc2: f64,
    #[serde(rename = "N_c")]
    pub n_c: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerCalibration {
    pub precision: f64,
    pub asc1: f64,
    pub residual: f64,
    pub evaluations: usize,
}

/// Pointer precision at which Alice1's simulated ASC equals `n_c`.
pub fn pointer_calibration(d: PrimeDim, metric: CoherenceMetric, n_c: f64) -> Result<PointerCalibration> {
    let mub = build_mub(d)?;
    let projs = projections(&max_entangled_state(d), &mub);
    let asc1 = |g: f64| -> Result<f64> {
        let family = (0..mub.num_bases())
            .map(|v| PointerSetting::new(&mub, v, g))
            .collect::<Result<Vec<_>>>()?;
        let ens = ensembles_from_projections(&projs, &family)?;
        let cost = cost_matrix(&ens, &mub, metric)?;
        Ok(permuted_from_cost(&cost, d.get())?.0)
    };
    let mut evaluations = 0;
    let precision = illinois(
        |g| {
            evaluations += 1;
            Ok(asc1(g)? - n_c)
        },
        1e-9,
        1.0,
        1e-10,
    )?;
    let value = asc1(precision)?;
    Ok(PointerCalibration { precision, asc1: value, residual: (value - n_c).abs(), evaluations: evaluations + 1 })
}

/// `N_{A2B} - N_c` for every prime up to `dmax`, with Alice1 at her
/// threshold and a sharp Alice2.
pub fn fig3_data(dmax: usize, metric: CoherenceMetric, mode: Fig3Mode, opts: &OptimizerOptions) -> Result<Vec<Fig3Row>> {
    primes_up_to(dmax)
        .into_iter()
        .map(|p| {
            let d = PrimeDim::new(p)?;
            match mode {
                Fig3Mode::Unsharp => {
                    let t = critical_sharpness(d, metric, opts)?;
                    let asc2 = alice2_asc_closed(p, t.lambda_crit, 1.0, metric);
                    Ok(Fig3Row {
                        d: p,
                        lambda1: t.lambda_crit,
                        asc1: alice1_asc_closed(p, t.lambda_crit, metric),
                        asc2,
                        n_c: t.n_c,
                        delta: asc2 - t.n_c,
                    })
                }
                Fig3Mode::Pointer => {
                    let (n_c, _) = threshold(d, metric, opts)?;
                    let cal = pointer_calibration(d, metric, n_c)?;
                    let profile = [
                        AliceSharpness::Pointer { precision: cal.precision },
                        AliceSharpness::Uniform { lambda: 1.0 },
                    ];
                    let chain = simulate_chain(d, &profile, &InputBias::uniform(d), metric, n_c)?;
                    let asc2 = chain.alices[1].asc.value;
                    Ok(Fig3Row { d: p, lambda1: cal.precision, asc1: cal.asc1, asc2, n_c, delta: asc2 - n_c })
                }
            }
        })
        .collect()
}
