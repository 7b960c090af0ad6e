use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not a prime")]
    NotPrime(usize),
    #[error("dimension {dim} exceeds the supported ceiling {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a perfect square")]
    NotSquareDimension(usize),
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} differs from 1")]
    NotNormalized { trace: f64 },
    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("vector norm {norm} differs from 1")]
    NotUnitNorm { norm: f64 },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("{what} index {index} out of range 0..{len}")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("sharpness {0} outside (0, 1]")]
    SharpnessOutOfRange(f64),
    #[error("precision {0} outside (0, 1]")]
    PrecisionOutOfRange(f64),
    #[error("branch probability {prob:e} too small to normalize")]
    DegenerateBranch { prob: f64 },
    #[error("two-term channel model does not fit (residual {residual:e})")]
    ModelMismatch { residual: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },
    #[error("optimizer did not converge (best value so far {best})")]
    OptimizerNoConvergence { best: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("invalid input bias: {0}")]
    InvalidBias(String),
    #[error("{count} branch states exceed the cap {cap}; use the closed forms instead")]
    TooManyBranches { count: usize, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
