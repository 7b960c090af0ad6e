use serde::{Deserialize, Serialize};

use super::eigen::eigenvalues_hermitian;
use super::matrix::{norm, CMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerances::{MAX_PRIME_DIM, TOL_HERMITIAN, TOL_NORM, TOL_PSD, TOL_TRACE};

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// All primes `2 <= p <= n`.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// A prime single-qudit dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct PrimeDim(usize);

impl PrimeDim {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_ceiling(d, MAX_PRIME_DIM)
    }

    pub fn with_ceiling(d: usize, max: usize) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        if d > max {
            return Err(Error::DimensionTooLarge { dim: d, max });
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `d - 1`.
    pub fn d1(self) -> usize {
        self.0 - 1
    }
}

impl TryFrom<usize> for PrimeDim {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<PrimeDim> for usize {
    fn from(d: PrimeDim) -> usize {
        d.0
    }
}

impl std::fmt::Display for PrimeDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > TOL_NORM {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnitNorm { norm: n });
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityOp {
        DensityOp::from_trusted(self.projector())
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: CMatrix,
}

impl DensityOp {
    /// Validates all invariants (Hermiticity, trace and positivity).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix produced by a map known to preserve the invariants.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// Normalizes a positive operator by its trace.
    pub(crate) fn from_unnormalized(matrix: CMatrix) -> Result<(f64, Self)> {
        let tr = matrix.trace().re;
        if tr < crate::tolerances::MIN_BRANCH_PROB {
            return Err(Error::DegenerateBranch { prob: tr });
        }
        Ok((tr, Self::from_trusted(matrix.scale_real(1.0 / tr))))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::from_trusted(CMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
        }
        let deviation = m.hermitian_deviation();
        if deviation > TOL_HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized { trace });
        }
        let values = eigenvalues_hermitian(m)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityOp, w: f64) -> DensityOp {
        let mut m = self.matrix.scale_real(w);
        m.add_scaled(&other.matrix, 1.0 - w);
        DensityOp::from_trusted(m)
    }

    pub fn tensor(&self, other: &DensityOp) -> DensityOp {
        DensityOp::from_trusted(super::matrix::kron(&self.matrix, &other.matrix))
    }
}

/// Which half of a two-qudit system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Side length `d` of a `d^2 x d^2` matrix.
pub fn local_dim(m: &CMatrix) -> Result<usize> {
    let n = m.rows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || !m.is_square() {
        return Err(Error::NotSquareDimension(n));
    }
    Ok(d)
}

/// Traces out `traced` from a bipartite operator on `d x d`.
pub fn partial_trace_matrix(m: &CMatrix, traced: Subsystem) -> Result<CMatrix> {
    let d = local_dim(m)?;
    let out = match traced {
        Subsystem::A => CMatrix::from_fn(d, d, |b, bp| (0..d).map(|k| m[(k * d + b, k * d + bp)]).sum()),
        Subsystem::B => CMatrix::from_fn(d, d, |a, ap| (0..d).map(|k| m[(a * d + k, ap * d + k)]).sum()),
    };
    Ok(out)
}

/// Reduced state of the subsystem that is kept when `traced` is discarded.
pub fn partial_trace(rho: &DensityOp, traced: Subsystem) -> Result<DensityOp> {
    partial_trace_matrix(rho.matrix(), traced).map(DensityOp::from_trusted)
}

/// Entropy in bits of a probability vector; entries within `TOL_PSD` below
/// zero are clipped, larger negativity is an error.
pub fn entropy_bits(probs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in probs {
        if p < -TOL_PSD {
            return Err(Error::NotPositive { min_eigenvalue: p });
        }
        let p = p.clamp(0.0, 1.0);
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    Ok(s)
}

/// Binary entropy `H2(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityOp) -> Result<f64> {
    entropy_bits(&eigenvalues_hermitian(rho.matrix())?)
}

/// `(1/sqrt(d)) sum_k |kk>`.
pub fn max_entangled_vector(d: usize) -> Vec<C64> {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        v[k * d + k] = amp;
    }
    v
}

/// Maximally entangled two-qudit state as a density operator.
pub fn max_entangled_state(d: PrimeDim) -> DensityOp {
    let v = max_entangled_vector(d.get());
    DensityOp::from_trusted(CMatrix::outer(&v, &v))
}
