//! Several Alices measuring one half of a maximally entangled pair in turn,
//! each passing the nonselectively updated state to the next, against a
//! single Bob.

mod chsh;
mod fig3;
mod scan;

pub use chsh::{chsh_residual_d2, correlation_matrix_2q, horodecki_chsh, ChshReport};
pub use fig3::{fig3_data, pointer_calibration, Fig3Mode, Fig3Row, PointerCalibration};
pub use scan::{region_scan, RegionCell, RegionScan};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::CoherenceMetric;
use crate::error::{Error, Result};
use crate::measurement::{apply_nonselective, lambda0, make_unsharp, Instrument, PointerSetting, Setting, Sharpness};
use crate::mub::{build_mub, MubFamily};
use crate::naqc::{asc_permuted, steered_ensembles, AscReport, Framework};
use crate::qcore::{binary_entropy, max_entangled_state, DensityOp, PrimeDim};

/// Cap on the number of branch states a chain may enumerate.
pub const MAX_CHAIN_BRANCHES: usize = 100_000;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Alice1's permuted ASC on the maximally entangled state.
pub fn alice1_asc_closed(d: usize, lambda1: f64, metric: CoherenceMetric) -> f64 {
    let df = d as f64;
    let d1 = df - 1.0;
    match metric {
        CoherenceMetric::L1 => (df * df - 1.0) * lambda1,
        CoherenceMetric::Re => {
            (df + 1.0) / df * (xlog2x(1.0 + d1 * lambda1) + d1 * xlog2x(1.0 - lambda1))
        }
    }
}

/// Alice2's ASC after Alice1's nonselective measurement, averaged over
/// Alice1's settings.
pub fn alice2_asc_closed(d: usize, lambda1: f64, lambda2: f64, metric: CoherenceMetric) -> f64 {
    let df = d as f64;
    let d1 = df - 1.0;
    let l0 = lambda0(d, lambda1);
    match metric {
        CoherenceMetric::L1 => d1 * (1.0 + df * l0) * lambda2,
        CoherenceMetric::Re => {
            (1.0 + df) * df.log2()
                - d1 * (1.0 - l0 * lambda2 + (1.0 - lambda2) / df) * d1.log2()
                - binary_entropy((1.0 + d1 * lambda2) / df)
                - df * binary_entropy((1.0 + d1 * l0 * lambda2) / df)
        }
    }
}

/// Unequal per-setting sharpness at `d = 2` with a sharp Alice2: returns
/// `(sum_v lambda_v, 1 + (2/3) sum_v sqrt(1 - lambda_v^2))`.
pub fn unequal_sharpness_d2(d: PrimeDim, lambdas: &[f64]) -> Result<(f64, f64)> {
    if d.get() != 2 {
        return Err(Error::Unsupported(format!("unequal-sharpness closed form needs d = 2, got {d}")));
    }
    if lambdas.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: lambdas.len() });
    }
    for &l in lambdas {
        Sharpness::new(l)?;
    }
    let a1 = lambdas.iter().sum();
    let a2 = 1.0 + 2.0 / 3.0 * lambdas.iter().map(|l| (1.0 - l * l).sqrt()).sum::<f64>();
    Ok((a1, a2))
}

/// How one Alice measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AliceSharpness {
    Uniform { lambda: f64 },
    PerSetting { lambdas: Vec<f64> },
    Pointer { precision: f64 },
}

impl AliceSharpness {
    pub fn instruments(&self, mub: &MubFamily) -> Result<Vec<Setting>> {
        let nb = mub.num_bases();
        match self {
            AliceSharpness::Uniform { lambda } => {
                let l = Sharpness::new(*lambda)?;
                (0..nb).map(|v| make_unsharp(mub, v, l).map(Setting::Unsharp)).collect()
            }
            AliceSharpness::PerSetting { lambdas } => {
                if lambdas.len() != nb {
                    return Err(Error::DimensionMismatch { expected: nb, found: lambdas.len() });
                }
                lambdas
                    .iter()
                    .enumerate()
                    .map(|(v, &l)| make_unsharp(mub, v, Sharpness::new(l)?).map(Setting::Unsharp))
                    .collect()
            }
            AliceSharpness::Pointer { precision } => {
                (0..nb).map(|v| PointerSetting::new(mub, v, *precision).map(Setting::Pointer)).collect()
            }
        }
    }
}

/// Probabilities with which each Alice picks her setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputBias {
    weights: Vec<f64>,
}

impl InputBias {
    pub fn uniform(d: PrimeDim) -> Self {
        let n = d.get() + 1;
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn new(d: PrimeDim, weights: Vec<f64>) -> Result<Self> {
        let n = d.get() + 1;
        if weights.len() != n {
            return Err(Error::InvalidBias(format!("expected {n} weights, got {}", weights.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidBias("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBias(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AliceReport {
    pub index: usize,
    #[serde(flatten)]
    pub asc: AscReport,
    /// Number of prior setting sequences with nonzero weight.
    pub branches: usize,
    pub branch_min: f64,
    pub branch_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub d: usize,
    pub metric: CoherenceMetric,
    pub profile: Vec<AliceSharpness>,
    pub bias: Vec<f64>,
    /// Quality factor of each setting, per Alice.
    pub quality_factors: Vec<Vec<f64>>,
    pub alices: Vec<AliceReport>,
}

struct Chain<'a> {
    mub: &'a MubFamily,
    metric: CoherenceMetric,
    n_c: f64,
    instruments: Vec<Vec<Setting>>,
    bias: &'a [f64],
}

/// Per-level lists of `(weight, permuted ASC)` below one branch state.
type Leaves = Vec<Vec<(f64, f64, Option<Vec<usize>>)>>;

impl Chain<'_> {
    fn visit(&self, state: &DensityOp, level: usize, weight: f64) -> Result<Leaves> {
        let ens = steered_ensembles(state, &self.instruments[level])?;
        let rep = asc_permuted(&ens, self.mub, self.metric, self.n_c)?;
        let mut out: Leaves = vec![vec![]; self.instruments.len() - level];
        out[0].push((weight, rep.value, rep.permutation));
        if level + 1 == self.instruments.len() {
            return Ok(out);
        }
        let children: Vec<Leaves> = self.instruments[level]
            .par_iter()
            .zip(self.bias.par_iter())
            .filter(|(_, &w)| w > 0.0)
            .map(|(inst, &w)| {
                let next = apply_nonselective(state, inst)?;
                self.visit(&next, level + 1, weight * w)
            })
            .collect::<Result<_>>()?;
        for child in children {
            for (k, leaves) in child.into_iter().enumerate() {
                out[k + 1].extend(leaves);
            }
        }
        Ok(out)
    }
}

/// Exact enumeration of every prior setting sequence, starting from the
/// maximally entangled state. Alice k's value is the bias-weighted average
/// of the permuted ASC over the branch states she may receive.
pub fn simulate_chain(
    d: PrimeDim,
    profile: &[AliceSharpness],
    bias: &InputBias,
    metric: CoherenceMetric,
    n_c: f64,
) -> Result<ChainReport> {
    if profile.is_empty() {
        return Err(Error::InvalidArgument("a chain needs at least one Alice".into()));
    }
    if bias.weights.len() != d.get() + 1 {
        return Err(Error::InvalidBias(format!("bias has {} weights for d = {d}", bias.weights.len())));
    }
    let nb = d.get() + 1;
    let count = (0..profile.len() - 1).try_fold(1usize, |acc, _| acc.checked_mul(nb));
    match count {
        Some(c) if c <= MAX_CHAIN_BRANCHES => {}
        _ => {
            return Err(Error::TooManyBranches { count: count.unwrap_or(usize::MAX), cap: MAX_CHAIN_BRANCHES })
        }
    }
    let mub = build_mub(d)?;
    let instruments = profile.iter().map(|p| p.instruments(&mub)).collect::<Result<Vec<_>>>()?;
    let quality_factors = instruments.iter().map(|list| list.iter().map(|i| i.quality_factor()).collect()).collect();
    let chain = Chain { mub: &mub, metric, n_c, instruments, bias: &bias.weights };
    let leaves = chain.visit(&max_entangled_state(d), 0, 1.0)?;

    let alices = leaves
        .into_iter()
        .enumerate()
        .map(|(k, list)| {
            let value = list.iter().map(|(w, x, _)| w * x).sum::<f64>();
            let branch_min = list.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
            let branch_max = list.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
            let permutation = if list.len() == 1 { list[0].2.clone() } else { None };
            AliceReport {
                index: k + 1,
                asc: AscReport {
                    metric,
                    framework: Framework::Permuted,
                    value,
                    permutation,
                    critical: n_c,
                    violates: value > n_c,
                },
                branches: list.len(),
                branch_min,
                branch_max,
            }
        })
        .collect();
    Ok(ChainReport {
        d: d.get(),
        metric,
        profile: profile.to_vec(),
        bias: bias.weights.clone(),
        quality_factors,
        alices,
    })
}
