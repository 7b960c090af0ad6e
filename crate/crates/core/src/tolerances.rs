//! Numerical tolerances shared by validation code and tests.

/// Max absolute deviation from Hermiticity.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Allowed deviation of a density operator's trace from one.
pub const TOL_TRACE: f64 = 1e-10;
/// Eigenvalues down to `-TOL_PSD` are accepted (and clipped to zero).
pub const TOL_PSD: f64 = 1e-9;
/// Reconstruction error bound for `V diag(w) V^dagger`.
pub const TOL_RECON: f64 = 1e-9;
/// Unit norm tolerance for pure states.
pub const TOL_NORM: f64 = 1e-12;
/// Orthonormality and unbiasedness of basis families.
pub const TOL_BASIS: f64 = 1e-10;
/// Smallest branch probability that is still normalized.
pub const MIN_BRANCH_PROB: f64 = 1e-12;

/// Absolute off-diagonal convergence threshold of the Jacobi eigensolver.
pub const JACOBI_OFF_DIAG: f64 = 1e-12;
/// Sweep cap of the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest supported prime dimension.
pub const MAX_PRIME_DIM: usize = 31;
