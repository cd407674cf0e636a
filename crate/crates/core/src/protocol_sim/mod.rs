//! Exact simulation of one protocol iteration under a restricted collective
//! attack. This is the ground truth the analytic bound is checked against.

mod attack;
mod oracle;
mod params;
mod stats;

pub use attack::{
    attack_residual, derive_reverse_vectors, g_vectors, random_attack, random_attack_near_identity,
    RestrictedAttack, ReverseVectors,
};
pub use oracle::{build_rho_abe, ExactOracle};
pub use params::{Povm, ProtocolParams};
pub use stats::{simulate_statistics, ObservedStatistics, NULL_EVENT};
