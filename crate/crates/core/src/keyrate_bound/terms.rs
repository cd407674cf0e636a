use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::protocol_sim::ObservedStatistics;

const RADICAND_TOL: f64 = 1e-12;
/// Cap denominators below this leave the hidden parameter unconstrained.
pub const CAP_DENOM_FLOOR: f64 = 1e-12;
/// `q0·q3·α²·β²` below this makes `Re⟨e0|e3⟩` unrecoverable.
pub const DEGENERATE_DENOM: f64 = 1e-14;

fn checked_sqrt(x: f64, what: &str) -> Result<f64> {
    if x < -RADICAND_TOL {
        return Err(Error::Argument(format!("negative radicand {x} in {what}")));
    }
    Ok(x.max(0.0).sqrt())
}

/// Squared norms of the reverse-channel vectors that the statistics reveal
/// directly: `‖e0‖², ‖e1‖²` (B resent 0 after A sent `|0⟩`) and `‖f0‖², ‖f1‖²`
/// (B resent 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseNoise {
    pub e0: f64,
    pub e1: f64,
    pub f0: f64,
    pub f1: f64,
}

impl ReverseNoise {
    /// Reverse channel that flips either basis state with probability `q_r`.
    pub fn symmetric(q_r: f64) -> Self {
        Self { e0: 1.0 - q_r, e1: q_r, f0: q_r, f1: 1.0 - q_r }
    }

    pub fn from_stats(stats: &ObservedStatistics) -> Self {
        let e0 = stats.p_aa_0_0_0 / stats.p;
        let f0 = stats.p_aa_0_1_0 / stats.p;
        Self { e0, e1: 1.0 - e0, f0, f1: 1.0 - f0 }
    }
}

/// `[‖g0‖², ‖g1‖², ‖g2‖², ‖g3‖²]`.
pub fn g_norms_from_stats(stats: &ObservedStatistics) -> [f64; 4] {
    let p = stats.p;
    [
        stats.p_ab_a_1 * (1.0 - stats.p_aa_a_1_0 / p),
        stats.p_ab_a_1 * stats.p_aa_a_1_0 / p,
        stats.p_ab_a_0 * (1.0 - stats.p_aa_a_0_0 / p),
        stats.p_ab_a_0 * stats.p_aa_a_0_0 / p,
    ]
}

/// `Re⟨g1|g3⟩`, from A's "0" rate on reflected `|a⟩`.
pub fn re_g1g3_from_stats(stats: &ObservedStatistics) -> f64 {
    let g = g_norms_from_stats(stats);
    0.5 * (stats.p_aa_a_r_0 / stats.p - g[1] - g[3])
}

/// Forward-channel amplitudes fixed by the statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardAmplitudes {
    pub q0: f64,
    pub q1: f64,
    /// Smallest `q3` consistent with `P(1 | a)`; `q3` ranges over `[q3_min, 1]`.
    pub q3_min: f64,
    /// `P(1 | a) < α²·P(1 | 0)`: the lower limit was negative and is
    /// clamped to zero.
    pub assumption_violated: bool,
    /// The lower limit exceeds one: no restricted attack produces these
    /// statistics.
    pub infeasible: bool,
}

impl ForwardAmplitudes {
    pub fn q2_for(q3: f64) -> f64 {
        (1.0 - q3 * q3).max(0.0).sqrt()
    }
}

pub fn derive_qs(stats: &ObservedStatistics, alpha: f64) -> Result<ForwardAmplitudes> {
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    if !(beta > 0.0) {
        return arg(format!("forward amplitudes need β > 0 (alpha = {alpha})"));
    }
    let q0 = checked_sqrt(stats.p_ab_0_0, "q0")?;
    let q1 = checked_sqrt(stats.p_ab_0_1, "q1")?;
    let raw = (checked_sqrt(stats.p_ab_a_1, "q3 limit")? - alpha * q1) / beta;
    let assumption_violated = raw < 0.0;
    let infeasible = raw > 1.0 + 1e-9;
    Ok(ForwardAmplitudes {
        q0,
        q1,
        q3_min: raw.clamp(0.0, 1.0),
        assumption_violated,
        infeasible,
    })
}

/// Upper limits on `‖e2‖²` and `‖f3‖²` for a given `q3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenNoiseCaps {
    pub e2_cap: f64,
    pub f3_cap: f64,
    pub e2_unconstrained: bool,
    pub f3_unconstrained: bool,
}

pub(crate) fn caps_for(
    fwd: &ForwardAmplitudes,
    noise: &ReverseNoise,
    g: &[f64; 4],
    alpha: f64,
    beta: f64,
    q3: f64,
) -> HiddenNoiseCaps {
    let q2 = ForwardAmplitudes::q2_for(q3);
    let cap = |num: f64, den: f64| -> (f64, bool) {
        if den <= CAP_DENOM_FLOOR {
            (1.0, true)
        } else {
            (((num / den).powi(2)).clamp(0.0, 1.0), false)
        }
    };
    let (e2_cap, e2_unconstrained) =
        cap(fwd.q1 * alpha * noise.f0.max(0.0).sqrt() + g[1].max(0.0).sqrt(), q3 * beta);
    let (f3_cap, f3_unconstrained) =
        cap(fwd.q0 * alpha * noise.e1.max(0.0).sqrt() + g[2].max(0.0).sqrt(), q2 * beta);
    HiddenNoiseCaps { e2_cap, f3_cap, e2_unconstrained, f3_unconstrained }
}

pub fn hidden_noise_caps(stats: &ObservedStatistics, alpha: f64, q3: f64) -> Result<HiddenNoiseCaps> {
    if !(0.0..=1.0).contains(&q3) {
        return arg(format!("q3 = {q3} outside [0, 1]"));
    }
    let fwd = derive_qs(stats, alpha)?;
    let beta = (1.0 - alpha * alpha).sqrt();
    Ok(caps_for(&fwd, &ReverseNoise::from_stats(stats), &g_norms_from_stats(stats), alpha, beta, q3))
}

/// Upper bound on `|Re⟨e1|f2⟩α³β + …|`, the part of the reflected-`|a⟩`
/// overlap that depends on unobserved cross terms. `qs = [q0, q1, q2, q3]`.
pub fn chi_abs_max(alpha: f64, qs: [f64; 4], noise: &ReverseNoise, e2_sq: f64, f3_sq: f64) -> Result<f64> {
    for (name, v) in [("e0", noise.e0), ("e1", noise.e1), ("f0", noise.f0), ("f1", noise.f1)] {
        checked_sqrt(v, name)?;
    }
    for (name, v) in [("e2", e2_sq), ("f3", f3_sq)] {
        if !(-RADICAND_TOL..=1.0 + RADICAND_TOL).contains(&v) {
            return arg(format!("hidden parameter ‖{name}‖² = {v} outside [0, 1]"));
        }
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    Ok(chi_unchecked(alpha, beta, qs, noise, e2_sq.clamp(0.0, 1.0), f3_sq.clamp(0.0, 1.0)))
}

#[inline]
pub(crate) fn chi_unchecked(alpha: f64, beta: f64, qs: [f64; 4], n: &ReverseNoise, e2: f64, f3: f64) -> f64 {
    let [q0, q1, q2, q3] = qs;
    let s = |x: f64| x.max(0.0).sqrt();
    let (a2, b2) = (alpha * alpha, beta * beta);
    q0 * q1 * a2 * alpha * beta * (s(n.e0 * n.f1) + s(n.e1 * n.f0))
        + q0 * q3 * a2 * b2 * s(n.e1 * e2)
        + q1 * q2 * a2 * b2 * (s(n.f0 * f3) + s(n.f1 * (1.0 - f3)))
        + q2 * q3 * alpha * b2 * beta * (s(e2 * f3) + s((1.0 - e2) * (1.0 - f3)))
}

/// `(1/2p)(P_aa(a|a,R) − P(0|a)P_aa(a|a,0) − P(1|a)P_aa(a|a,1))`, the
/// statistic-only part of the `Re⟨e0|e3⟩` identity.
pub(crate) fn reflection_excess(stats: &ObservedStatistics) -> f64 {
    let p = stats.p;
    0.5 * (stats.p_aa_a_r_a - stats.p_ab_a_0 * stats.p_aa_a_0_a - stats.p_ab_a_1 * stats.p_aa_a_1_a) / p
}

/// `Re⟨e0|e3⟩` given the cross-term value `chi`; `None` when
/// `q0·q3·α²·β²` is too small to solve for it.
pub fn re_e0e3(stats: &ObservedStatistics, alpha: f64, q3: f64, chi: f64) -> Result<Option<f64>> {
    let fwd = derive_qs(stats, alpha)?;
    let beta = (1.0 - alpha * alpha).sqrt();
    Ok(re_e0e3_inner(reflection_excess(stats), re_g1g3_from_stats(stats), fwd.q0, alpha, beta, q3, chi))
}

#[inline]
pub(crate) fn re_e0e3_inner(
    excess: f64,
    re_g1g3: f64,
    q0: f64,
    alpha: f64,
    beta: f64,
    q3: f64,
    chi: f64,
) -> Option<f64> {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let den = q0 * q3 * a2 * b2;
    if den <= DEGENERATE_DENOM {
        return None;
    }
    Some((excess - (a2 - b2) * re_g1g3 - chi) / den)
}

/// Squared lower bound on `Re⟨e0|g0⟩`, floored at zero.
pub fn re2_e0g0_lower(stats: &ObservedStatistics, alpha: f64, q3: f64, re_e0e3: f64) -> Result<f64> {
    let fwd = derive_qs(stats, alpha)?;
    let noise = ReverseNoise::from_stats(stats);
    let beta = (1.0 - alpha * alpha).sqrt();
    let lower = re_e0g0_lower_inner(fwd.q1, alpha, beta, q3, re_e0e3, &noise);
    Ok(lower * lower)
}

#[inline]
pub(crate) fn re_e0g0_lower_inner(
    q1: f64,
    alpha: f64,
    beta: f64,
    q3: f64,
    re_e0e3: f64,
    noise: &ReverseNoise,
) -> f64 {
    (q3 * beta * re_e0e3 - alpha * q1 * (noise.e0 * noise.f1).max(0.0).sqrt()).max(0.0)
}
