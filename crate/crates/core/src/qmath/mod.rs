//! Dense complex linear algebra and entropy primitives for the small Hilbert
//! spaces that appear in the analysis (a transit qubit and Eve's ancilla,
//! plus two classical key registers). Everything here is a pure function of
//! immutable values.
//!
//! Tensor factors are ordered left to right with the left factor most
//! significant in the flattened index.

mod entropy;
mod linalg;
mod random;

pub use entropy::{
    binary_entropy, conditional_entropy, shannon_entropy, von_neumann_entropy,
};
pub use linalg::{
    eig_hermitian, inner, partial_trace, tensor, Eigen, Operator, StateVector, Tensor,
};

pub use random::{haar_unitary, random_ket};

pub use num_complex::Complex64 as C64;

/// Tolerance for "flagged normalized" state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity tolerance (max entry of `M - M†`).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIG_FLOOR, 0]` are treated as zero; anything more
/// negative means the operator is not positive semi-definite.
pub const EIG_FLOOR: f64 = 1e-10;
/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Default max-entry tolerance for complex comparisons.
pub const CMP_TOL: f64 = 1e-9;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}
