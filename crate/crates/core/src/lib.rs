//! Security analysis of the α-tuneable semi-quantum key distribution protocol.
//!
//! The crate has two halves that check each other:
//!
//! * [`protocol_sim`] simulates one protocol iteration exactly under a
//!   restricted collective attack (forward isometry plus reverse unitary),
//!   producing every statistic Alice and Bob can observe together with the
//!   exact S(A|E) of the resulting classical-quantum state.
//! * [`keyrate_bound`] turns observable statistics alone into a worst-case
//!   lower bound on S(A|E) and the Devetak–Winter rate `S(A|E) - H(A|B)`.
//!
//! [`channel_models`] produces the statistics of a depolarizing channel,
//! [`ir_analysis`] handles the intercept-resend attack on the variant without
//! a POVM, and [`sweep`] drives parameter sweeps and soundness runs.

// `!(x > 0.0)` style checks are used deliberately so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_models;
pub mod error;
pub mod ir_analysis;
pub mod keyrate_bound;
pub mod protocol_sim;
pub mod qmath;
pub mod sweep;

pub use error::{Error, Result};
