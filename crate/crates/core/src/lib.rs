//! Numerical laboratory for operator superquadratic functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, a Hermitian eigensolver, the
//!   spectral functional calculus and Loewner-order verdicts.
//! * [`funclass`]: scalar function specifications, the two-operator
//!   superquadratic and convexity deficits, and randomized classification.
//! * [`maps`]: positive unital maps, pinchings, projection resolutions and
//!   unitary completions of isometric block columns.
//! * [`jensen`]: every Jensen-type operator inequality as a deficit
//!   computation, plus random instance generation.
//! * [`falsify`]: derivative-free counterexample search and the fixed
//!   regression fixtures.
//!
//! Every deficit follows one sign convention: right-hand side minus
//! left-hand side, so a positive semidefinite deficit means the inequality
//! instance holds.

pub mod error;
pub mod falsify;
pub mod fmt17;
pub mod funclass;
pub mod jensen;
pub mod linalg;
pub mod maps;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{
    ComplexMatrix, HermitianMatrix, LoewnerVerdict, Relation, SpectralDecomposition, C64,
};

/// Default relative tolerance for Loewner verdicts.
pub const DEFAULT_TOL: f64 = 1e-8;
