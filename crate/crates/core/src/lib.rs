//! Sequential sharing of the nonlocal advantage of quantum coherence (NAQC).
//!
//! Several observers ("Alices") measure one half of a maximally entangled
//! two-qudit state one after another with unsharp measurements built on the
//! `d + 1` mutually unbiased bases of a prime dimension `d`. A single Bob
//! measures the coherence of his conditional states. This crate computes the
//! steered coherence each Alice can demonstrate, both from closed forms and
//! from explicit density-matrix simulation, together with the thresholds and
//! figure data that go with it.
//!
//! Layout:
//! - [`qcore`]: dense complex matrices, density operators, Jacobi eigensolver.
//! - [`mub`]: mutually unbiased bases for prime dimensions.
//! - [`measurement`]: unsharp POVMs, Lüders updates, pointer measurements.
//! - [`coherence`]: l1-norm and relative-entropy coherence.
//! - [`naqc`]: steered ensembles, ASC criteria, critical values and sharpness.
//! - [`sequential`]: multi-Alice chains, closed forms and figure tables.

pub mod coherence;
pub mod error;
pub mod measurement;
pub mod mub;
pub mod naqc;
pub mod qcore;
pub mod sequential;
pub mod tolerances;

pub use error::{Error, Result};
