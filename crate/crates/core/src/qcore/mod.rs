//! Dense complex linear algebra and quantum-state primitives.

mod eigen;
pub mod local;
mod matrix;
pub mod random;
mod state;

pub use eigen::{eig_hermitian, eigenvalues_hermitian, HermitianEigen};
pub use matrix::{inner, kron, norm, CMatrix, C64, ONE, ZERO};
pub use state::{
    binary_entropy, entropy_bits, is_prime, local_dim, max_entangled_state, max_entangled_vector,
    partial_trace, partial_trace_matrix, primes_up_to, vn_entropy, DensityOp, PrimeDim, PureState,
    Subsystem,
};
