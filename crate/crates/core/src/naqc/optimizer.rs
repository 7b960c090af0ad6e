//! Multi-start projected gradient ascent of the summed coherence
//! `sum_v C^v(|psi><psi|)` over pure states on the unit sphere of C^d.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherence::CoherenceMetric;
use crate::error::{Error, Result};
use crate::mub::MubFamily;
use crate::qcore::random::random_pure;
use crate::qcore::{inner, norm, CMatrix, C64};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub starts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { starts: 50, seed: DEFAULT_SEED, initial_step: 0.1, tol: 1e-10, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerOutcome {
    pub value: f64,
    #[serde(skip)]
    pub state: Vec<C64>,
    pub starts: usize,
    pub converged_starts: usize,
}

struct Objective<'a> {
    bases: &'a [CMatrix],
    adjoints: Vec<CMatrix>,
    metric: CoherenceMetric,
}

impl<'a> Objective<'a> {
    fn new(mub: &'a MubFamily, metric: CoherenceMetric) -> Self {
        let bases = mub.bases();
        Self { bases, adjoints: bases.iter().map(CMatrix::adjoint).collect(), metric }
    }

    /// Value and Euclidean gradient (twice the Wirtinger derivative).
    fn eval(&self, psi: &[C64]) -> (f64, Vec<C64>) {
        let d = psi.len();
        let mut f = 0.0;
        let mut grad = vec![C64::new(0.0, 0.0); d];
        for (u, adj) in self.bases.iter().zip(&self.adjoints) {
            let c = adj.apply(psi);
            let weights: Vec<C64> = match self.metric {
                CoherenceMetric::L1 => {
                    let s: f64 = c.iter().map(|z| z.norm()).sum();
                    f += s * s - 1.0;
                    c.iter()
                        .map(|z| {
                            let r = z.norm();
                            if r > 1e-300 { z * (2.0 * s / r) } else { C64::new(0.0, 0.0) }
                        })
                        .collect()
                }
                CoherenceMetric::Re => c
                    .iter()
                    .map(|z| {
                        let p = z.norm_sqr();
                        if p > 0.0 {
                            f -= p * p.log2();
                        }
                        z * (2.0 * (-p.max(1e-300).log2() - 1.0 / LN_2))
                    })
                    .collect(),
            };
            for (g, x) in grad.iter_mut().zip(u.apply(&weights)) {
                *g += x;
            }
        }
        (f, grad)
    }
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    v.iter_mut().for_each(|z| *z /= n);
}

fn ascend(obj: &Objective, mut psi: Vec<C64>, opts: &OptimizerOptions) -> (f64, Vec<C64>, bool) {
    let (mut f, mut g) = obj.eval(&psi);
    let mut eta = opts.initial_step;
    for _ in 0..opts.max_iter {
        let radial = inner(&psi, &g).re;
        let tangent: Vec<C64> = g.iter().zip(&psi).map(|(gi, pi)| gi - pi * radial).collect();
        if norm(&tangent) < 1e-14 {
            return (f, psi, true);
        }
        let mut trial: Vec<C64> = psi.iter().zip(&tangent).map(|(p, t)| p + t * eta).collect();
        normalize(&mut trial);
        let (ft, gt) = obj.eval(&trial);
        if ft > f {
            let gain = ft - f;
            psi = trial;
            f = ft;
            g = gt;
            eta = (eta * 1.5).min(1e3);
            if gain < opts.tol {
                return (f, psi, true);
            }
        } else {
            eta *= 0.5;
            if eta < 1e-16 {
                return (f, psi, true);
            }
        }
    }
    (f, psi, false)
}

/// Summed coherence of a pure state over all bases of the family.
pub fn summed_coherence_pure(mub: &MubFamily, psi: &[C64], metric: CoherenceMetric) -> f64 {
    Objective::new(mub, metric).eval(psi).0
}

/// Maximizes the summed coherence. Restarts use seeds `seed + i`; the best
/// value wins, earliest start on ties.
pub fn maximize_summed_coherence(
    mub: &MubFamily,
    metric: CoherenceMetric,
    opts: &OptimizerOptions,
) -> Result<OptimizerOutcome> {
    let obj = Objective::new(mub, metric);
    let d = mub.d().get();
    let runs: Vec<(f64, Vec<C64>, bool)> = (0..opts.starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let start = random_pure(d, &mut rng).amplitudes().to_vec();
            ascend(&obj, start, opts)
        })
        .collect();
    let converged_starts = runs.iter().filter(|r| r.2).count();
    let (value, state, _) = runs
        .into_iter()
        .reduce(|best, r| if r.0 > best.0 { r } else { best })
        .ok_or_else(|| Error::InvalidArgument("optimizer needs at least one start".into()))?;
    if converged_starts == 0 {
        return Err(Error::OptimizerNoConvergence { best: value });
    }
    Ok(OptimizerOutcome { value, state, starts: opts.starts, converged_starts })
}
