//! Lower bound on the conditional entropy S(A|E) from observed statistics
//! alone, and the resulting asymptotic key rate.

mod bound;
mod terms;
mod theorem;

pub use bound::{
    h_a_given_b, key_rate, sae_lower, BoundBreakdown, BoundDiagnostics, GridSpec, HiddenParams, KeyRateReport,
    SaeBound,
};
pub use terms::{
    chi_abs_max, derive_qs, g_norms_from_stats, hidden_noise_caps, re2_e0g0_lower, re_e0e3, re_g1g3_from_stats,
    ForwardAmplitudes, HiddenNoiseCaps, ReverseNoise, CAP_DENOM_FLOOR, DEGENERATE_DENOM,
};
pub use theorem::{lambda_fn, theorem1_bound, CqPair};
