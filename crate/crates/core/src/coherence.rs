//! l1-norm and relative-entropy coherence with respect to an orthonormal basis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::MubFamily;
use crate::qcore::{entropy_bits, vn_entropy, CMatrix, DensityOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceMetric {
    L1,
    Re,
}

impl CoherenceMetric {
    pub const ALL: [CoherenceMetric; 2] = [CoherenceMetric::L1, CoherenceMetric::Re];
}

impl fmt::Display for CoherenceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoherenceMetric::L1 => "l1",
            CoherenceMetric::Re => "re",
        })
    }
}

impl FromStr for CoherenceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(CoherenceMetric::L1),
            "re" => Ok(CoherenceMetric::Re),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}, expected l1 or re"))),
        }
    }
}

fn rotated(rho: &CMatrix, basis: &CMatrix) -> Result<CMatrix> {
    if basis.rows() != rho.rows() || basis.cols() != rho.rows() {
        return Err(Error::DimensionMismatch { expected: rho.rows(), found: basis.rows() });
    }
    Ok(rho.conjugate_by(basis))
}

fn l1_of(r: &CMatrix) -> f64 {
    let n = r.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += r[(i, j)].norm();
            }
        }
    }
    s
}

fn dephased_entropy(r: &CMatrix) -> Result<f64> {
    let diag: Vec<f64> = (0..r.rows()).map(|i| r[(i, i)].re).collect();
    entropy_bits(&diag)
}

/// Coherence of `rho` in the basis formed by the columns of `basis`.
pub fn coherence(rho: &DensityOp, basis: &CMatrix, metric: CoherenceMetric) -> Result<f64> {
    let r = rotated(rho.matrix(), basis)?;
    match metric {
        CoherenceMetric::L1 => Ok(l1_of(&r)),
        CoherenceMetric::Re => Ok((dephased_entropy(&r)? - vn_entropy(rho)?).max(0.0)),
    }
}

/// Coherence in every basis of the family; the state entropy is computed once.
pub fn coherence_all_bases(rho: &DensityOp, mub: &MubFamily, metric: CoherenceMetric) -> Result<Vec<f64>> {
    let s = match metric {
        CoherenceMetric::Re => vn_entropy(rho)?,
        CoherenceMetric::L1 => 0.0,
    };
    mub.bases()
        .iter()
        .map(|b| {
            let r = rotated(rho.matrix(), b)?;
            Ok(match metric {
                CoherenceMetric::L1 => l1_of(&r),
                CoherenceMetric::Re => (dephased_entropy(&r)? - s).max(0.0),
            })
        })
        .collect()
}

/// Lowest-index basis in which `rho` is diagonal (off-diagonal l1 mass below 1e-10).
pub fn coherence_diag_basis(rho: &DensityOp, mub: &MubFamily) -> Option<usize> {
    let masses = coherence_all_bases(rho, mub, CoherenceMetric::L1).ok()?;
    let (best, mass) = masses
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (v, &m)| if m < acc.1 { (v, m) } else { acc });
    (mass < 1e-10).then_some(best)
}
