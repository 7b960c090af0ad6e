//! Steered ensembles, average steered coherence (ASC) in both frameworks,
//! critical values `N_c` and critical sharpness.

pub mod assignment;
pub mod optimizer;
pub mod roots;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::coherence::{coherence_all_bases, CoherenceMetric};
use crate::error::{Error, Result};
use crate::measurement::Instrument;
use crate::mub::{build_mub, MubFamily};
use crate::qcore::local::{projected_b_operators, weighted_sum};
use crate::qcore::{CMatrix, DensityOp, PrimeDim};
use crate::sequential::alice1_asc_closed;

use assignment::{assignment_value, brute_force_assignment, max_assignment};
use optimizer::{maximize_summed_coherence, OptimizerOptions, OptimizerOutcome};

/// Largest `d` for which [`asc_permuted`] re-solves the assignment by brute force.
pub const BRUTE_FORCE_MAX_D: usize = 5;

#[derive(Debug, Clone)]
pub struct Branch {
    pub prob: f64,
    pub state: DensityOp,
}

/// Outcomes of one setting: probabilities and conditional states of B.
#[derive(Debug, Clone)]
pub struct SteeredEnsemble {
    pub v: usize,
    pub branches: Vec<Branch>,
}

/// `tau^v_m = tr_A[(|phi^v_m><phi^v_m| (x) I) rho]` for every basis of the family.
pub fn projections(rho_ab: &DensityOp, mub: &MubFamily) -> Vec<Vec<CMatrix>> {
    let d = mub.d().get();
    mub.bases().par_iter().map(|u| projected_b_operators(rho_ab.matrix(), d, u)).collect()
}

/// Builds ensembles from precomputed projections. The state of B after
/// outcome `a` only depends on the effect, so each branch is a weighted sum
/// of the `tau^v_m`.
pub fn ensembles_from_projections<I: Instrument>(
    projs: &[Vec<CMatrix>],
    instruments: &[I],
) -> Result<Vec<SteeredEnsemble>> {
    instruments
        .iter()
        .map(|inst| {
            let v = inst.setting();
            let taus = projs
                .get(v)
                .ok_or(Error::IndexOutOfRange { what: "setting", index: v, len: projs.len() })?;
            let branches = (0..inst.dim())
                .map(|a| {
                    let sigma = weighted_sum(taus, &inst.effect_weights(a));
                    let (prob, state) = DensityOp::from_unnormalized(sigma.hermitian_part())?;
                    Ok(Branch { prob, state })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SteeredEnsemble { v, branches })
        })
        .collect()
}

pub fn steered_ensembles<I: Instrument>(rho_ab: &DensityOp, instruments: &[I]) -> Result<Vec<SteeredEnsemble>> {
    let d = match instruments.first() {
        Some(i) => i.dim(),
        None => return Ok(vec![]),
    };
    if rho_ab.dim() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: rho_ab.dim() });
    }
    let n = instruments.iter().map(|i| i.setting() + 1).max().unwrap_or(0);
    let mut projs = vec![vec![]; n];
    for inst in instruments {
        projs[inst.setting()] = projected_b_operators(rho_ab.matrix(), d, inst.basis());
    }
    ensembles_from_projections(&projs, instruments)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    Averaged,
    Permuted,
}

#[derive(Debug, Clone, Serialize)]
pub struct AscReport {
    pub metric: CoherenceMetric,
    pub framework: Framework,
    pub value: f64,
    /// `beta[v]`: reference basis paired with setting `v`.
    pub permutation: Option<Vec<usize>>,
    #[serde(rename = "N_c")]
    pub critical: f64,
    pub violates: bool,
}

impl AscReport {
    fn new(metric: CoherenceMetric, framework: Framework, value: f64, permutation: Option<Vec<usize>>, critical: f64) -> Self {
        Self { metric, framework, value, permutation, critical, violates: value > critical }
    }
}

/// `M[v][u] = sum_a p_a C^u(rho_{B|v,a})`.
pub fn cost_matrix(ensembles: &[SteeredEnsemble], mub: &MubFamily, metric: CoherenceMetric) -> Result<Vec<Vec<f64>>> {
    let nb = mub.num_bases();
    if ensembles.len() != nb || ensembles.iter().enumerate().any(|(v, e)| e.v != v) {
        return Err(Error::InvalidArgument(format!("expected ensembles for settings 0..{nb} in order")));
    }
    ensembles
        .par_iter()
        .map(|e| {
            let mut row = vec![0.0; nb];
            for b in &e.branches {
                for (r, c) in row.iter_mut().zip(coherence_all_bases(&b.state, mub, metric)?) {
                    *r += b.prob * c;
                }
            }
            Ok(row)
        })
        .collect()
}

pub fn averaged_value(m: &[Vec<f64>], d: usize) -> f64 {
    let mut s = 0.0;
    for (v, row) in m.iter().enumerate() {
        for (u, x) in row.iter().enumerate() {
            if u != v {
                s += x;
            }
        }
    }
    s / d as f64
}

/// ASC averaged over the bases other than the measured one.
pub fn asc_averaged(
    ensembles: &[SteeredEnsemble],
    mub: &MubFamily,
    metric: CoherenceMetric,
    n_c: f64,
) -> Result<AscReport> {
    let m = cost_matrix(ensembles, mub, metric)?;
    Ok(AscReport::new(metric, Framework::Averaged, averaged_value(&m, mub.d().get()), None, n_c))
}

/// Maximum over basis assignments of a cost matrix; brute-force cross-check
/// for small `d`.
pub fn permuted_from_cost(m: &[Vec<f64>], d: usize) -> Result<(f64, Vec<usize>)> {
    let best = max_assignment(m);
    if d <= BRUTE_FORCE_MAX_D {
        let brute = brute_force_assignment(m);
        if (brute.value - best.value).abs() > 1e-9 * best.value.abs().max(1.0) {
            return Err(Error::Inconsistent(format!(
                "assignment solver {} disagrees with brute force {}",
                best.value, brute.value
            )));
        }
    }
    Ok((best.value, best.beta))
}

/// ASC maximized over bijections between settings and reference bases.
pub fn asc_permuted(
    ensembles: &[SteeredEnsemble],
    mub: &MubFamily,
    metric: CoherenceMetric,
    n_c: f64,
) -> Result<AscReport> {
    let m = cost_matrix(ensembles, mub, metric)?;
    let (value, beta) = permuted_from_cost(&m, mub.d().get())?;
    Ok(AscReport::new(metric, Framework::Permuted, value, Some(beta), n_c))
}

/// Reference-basis pairing for the maximally entangled input:
/// `0 -> d`, `d -> 0`, `r -> r`.
pub fn mirror_assignment(d: usize) -> Vec<usize> {
    (0..=d)
        .map(|v| match v {
            0 => d,
            v if v == d => 0,
            r => r,
        })
        .collect()
}

/// Value of a fixed assignment, for argmax-membership checks.
pub fn fixed_assignment_value(m: &[Vec<f64>], beta: &[usize]) -> f64 {
    assignment_value(m, beta)
}

/// `(d - 1) sqrt(d (d + 1))`: the l1 threshold for which Alice1's critical
/// sharpness is `sqrt(d / (d + 1))`.
pub fn closed_form_l1_critical(d: usize) -> f64 {
    let df = d as f64;
    (df - 1.0) * (df * (df + 1.0)).sqrt()
}

/// Numerical maximum of the summed coherence over pure states.
pub fn critical_value(d: PrimeDim, metric: CoherenceMetric, opts: &OptimizerOptions) -> Result<OptimizerOutcome> {
    let mub = build_mub(d)?;
    maximize_summed_coherence(&mub, metric, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    ClosedForm,
    Optimizer,
}

type ThresholdKey = (usize, CoherenceMetric, u64);

fn threshold_cache() -> &'static Mutex<HashMap<ThresholdKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<ThresholdKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Threshold used by every violation flag: the closed form for l1, the
/// optimizer maximum for re (memoized per `(d, seed)`).
pub fn threshold(d: PrimeDim, metric: CoherenceMetric, opts: &OptimizerOptions) -> Result<(f64, ThresholdSource)> {
    match metric {
        CoherenceMetric::L1 => Ok((closed_form_l1_critical(d.get()), ThresholdSource::ClosedForm)),
        CoherenceMetric::Re => {
            let key = (d.get(), metric, opts.seed);
            if let Some(&v) = threshold_cache().lock().unwrap().get(&key) {
                return Ok((v, ThresholdSource::Optimizer));
            }
            let v = critical_value(d, metric, opts)?.value;
            threshold_cache().lock().unwrap().insert(key, v);
            Ok((v, ThresholdSource::Optimizer))
        }
    }
}

pub fn default_threshold(d: PrimeDim, metric: CoherenceMetric) -> Result<f64> {
    threshold(d, metric, &OptimizerOptions::default()).map(|t| t.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub d: usize,
    pub metric: CoherenceMetric,
    #[serde(rename = "N_c")]
    pub n_c: f64,
    pub n_c_source: ThresholdSource,
    pub lambda_crit: f64,
    pub residual: f64,
}

/// Sharpness at which Alice1's ASC reaches `N_c`.
pub fn critical_sharpness(d: PrimeDim, metric: CoherenceMetric, opts: &OptimizerOptions) -> Result<ThresholdReport> {
    let (n_c, source) = threshold(d, metric, opts)?;
    let f = |l: f64| Ok(alice1_asc_closed(d.get(), l, metric) - n_c);
    let lambda_crit = roots::bisect(f, 0.0, 1.0, 1e-15)?;
    let residual = (alice1_asc_closed(d.get(), lambda_crit, metric) - n_c).abs();
    if residual > 1e-8 {
        return Err(Error::Inconsistent(format!("critical sharpness residual {residual:e}")));
    }
    Ok(ThresholdReport { d: d.get(), metric, n_c, n_c_source: source, lambda_crit, residual })
}
