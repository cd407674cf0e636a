use serde::{Deserialize, Serialize};

use super::terms::{
    caps_for, chi_unchecked, derive_qs, g_norms_from_stats, re_e0e3_inner, re_e0g0_lower_inner, re_g1g3_from_stats,
    reflection_excess, ForwardAmplitudes, ReverseNoise,
};
use super::theorem::lambda_unchecked;
use crate::error::{arg, Result};
use crate::protocol_sim::ObservedStatistics;
use crate::qmath::{binary_entropy, shannon_entropy};

/// Grid over `(q3, ‖e2‖², ‖f3‖²)` used to minimize the entropy bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Each pass re-grids the two-cell box around the current best point.
    pub refine_passes: usize,
    /// Clamp `Re⟨e0|e3⟩` into `±√(‖e0‖²(1 − ‖e2‖²))` before use.
    pub clamp_cauchy_schwarz: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points_per_axis: 64, refine_passes: 1, clamp_cauchy_schwarz: false }
    }
}

impl GridSpec {
    pub fn with_points(points_per_axis: usize) -> Self {
        Self { points_per_axis, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 2 {
            return arg(format!("grid needs at least 2 points per axis, got {}", self.points_per_axis));
        }
        Ok(())
    }
}

/// Values of the unobserved parameters at the minimizing grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenParams {
    pub q3: f64,
    pub e2_sq: f64,
    pub f3_sq: f64,
}

/// Every intermediate quantity at one point of the minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub g_norms: [f64; 4],
    pub re_g1g3: f64,
    pub chi_abs_max: f64,
    /// `None` on the degenerate-denominator path.
    pub re_e0e3: Option<f64>,
    pub re2_e0g0_lower: f64,
    pub lambda: f64,
    pub sae_term: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    /// `P(1|a) < α²·P(1|0)`; the `q3` lower limit was clamped to zero.
    pub assumption_violated: bool,
    /// No restricted attack reproduces the forward statistics.
    pub infeasible: bool,
    /// α ∈ {0, 1}: the bound is zero by construction.
    pub degenerate_alpha: bool,
    pub degenerate_points: usize,
    pub unconstrained_cap_points: usize,
    pub cauchy_schwarz_clamps: usize,
    /// Points where the `Re⟨e0|g0⟩` lower limit exceeded Cauchy–Schwarz and
    /// λ was clamped to one.
    pub lambda_clamped_points: usize,
    /// Distance of the statistics from the symmetric-noise relations.
    pub symmetry_residual: f64,
}

/// Result of minimizing the entropy bound over the hidden parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaeBound {
    pub value: f64,
    pub argmin: Option<HiddenParams>,
    pub breakdown: Option<BoundBreakdown>,
    pub grid_points_evaluated: usize,
    pub diagnostics: BoundDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub alpha: f64,
    pub p: f64,
    pub sae_lower: f64,
    pub hab: f64,
    pub rate: f64,
    pub argmin: Option<HiddenParams>,
    pub breakdown: Option<BoundBreakdown>,
    pub grid_points_evaluated: usize,
    pub diagnostics: BoundDiagnostics,
}

impl KeyRateReport {
    pub fn is_feasible(&self) -> bool {
        !self.diagnostics.infeasible
    }
}

/// Quantities that do not vary over the grid.
struct Context {
    alpha: f64,
    beta: f64,
    fwd: ForwardAmplitudes,
    noise: ReverseNoise,
    g: [f64; 4],
    re_g1g3: f64,
    excess: f64,
    clamp_cs: bool,
    nx: f64,
    ny: f64,
    share_entropy: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    evaluated: usize,
    degenerate: usize,
    unconstrained: usize,
    cs_clamps: usize,
    lambda_clamps: usize,
}

impl Counters {
    fn merge(&mut self, o: &Counters) {
        self.evaluated += o.evaluated;
        self.degenerate += o.degenerate;
        self.unconstrained += o.unconstrained;
        self.cs_clamps += o.cs_clamps;
        self.lambda_clamps += o.lambda_clamps;
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    /// Grid coordinates `(q3, u, v)` with `e2 = u·cap_e2`, `f3 = v·cap_f3`.
    at: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    term: f64,
    chi: f64,
    re_e0e3: Option<f64>,
    re2: f64,
    lambda: f64,
    cs_clamped: bool,
    lambda_clamped: bool,
}

impl Context {
    fn new(stats: &ObservedStatistics, alpha: f64, grid: &GridSpec) -> Result<Self> {
        let beta = (1.0 - alpha * alpha).sqrt();
        let fwd = derive_qs(stats, alpha)?;
        let noise = ReverseNoise::from_stats(stats);
        let g = g_norms_from_stats(stats);
        let nx = fwd.q0 * fwd.q0 * noise.e0.max(0.0);
        let ny = g[0].max(0.0);
        let share_entropy = if nx + ny > 1e-15 { binary_entropy(nx / (nx + ny)) } else { 0.0 };
        Ok(Self {
            alpha,
            beta,
            fwd,
            noise,
            g,
            re_g1g3: re_g1g3_from_stats(stats),
            excess: reflection_excess(stats),
            clamp_cs: grid.clamp_cauchy_schwarz,
            nx,
            ny,
            share_entropy,
        })
    }

    fn eval(&self, q3: f64, e2: f64, f3: f64) -> Eval {
        let q2 = ForwardAmplitudes::q2_for(q3);
        let qs = [self.fwd.q0, self.fwd.q1, q2, q3];
        let chi = chi_unchecked(self.alpha, self.beta, qs, &self.noise, e2, f3);
        let mut out = Eval {
            term: 0.0,
            chi,
            re_e0e3: None,
            re2: 0.0,
            lambda: 1.0,
            cs_clamped: false,
            lambda_clamped: false,
        };
        let Some(mut re) =
            re_e0e3_inner(self.excess, self.re_g1g3, self.fwd.q0, self.alpha, self.beta, q3, chi)
        else {
            return out;
        };
        if self.clamp_cs {
            let lim = (self.noise.e0.max(0.0) * (1.0 - e2)).sqrt();
            if re.abs() > lim {
                re = re.clamp(-lim, lim);
                out.cs_clamped = true;
            }
        }
        out.re_e0e3 = Some(re);
        let lower = re_e0g0_lower_inner(self.fwd.q1, self.alpha, self.beta, q3, re, &self.noise);
        out.re2 = lower * lower;
        let total = self.nx + self.ny;
        if total <= 1e-15 {
            return out;
        }
        let re_inner = self.fwd.q0 * lower;
        out.lambda_clamped = re_inner * re_inner > self.nx * self.ny + 1e-12;
        out.lambda = lambda_unchecked(self.nx, self.ny, re_inner);
        out.term = (total / 2.0 * (self.share_entropy - binary_entropy(out.lambda))).max(0.0);
        out
    }

    /// Exhaustive search over a box in `(q3, u, v)`.
    fn search(&self, n: usize, bounds: [[f64; 2]; 3], counters: &mut Counters) -> Best {
        let axis = |[lo, hi]: [f64; 2]| -> Vec<f64> {
            if hi - lo <= 1e-15 {
                vec![lo]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let (q3s, us, vs) = (axis(bounds[0]), axis(bounds[1]), axis(bounds[2]));
        let mut best = Best { value: f64::INFINITY, at: [bounds[0][0], 0.0, 0.0] };
        for &q3 in &q3s {
            let caps = caps_for(&self.fwd, &self.noise, &self.g, self.alpha, self.beta, q3);
            let per_q3 = us.len() * vs.len();
            if caps.e2_unconstrained || caps.f3_unconstrained {
                counters.unconstrained += per_q3;
            }
            for &u in &us {
                for &v in &vs {
                    let e = self.eval(q3, u * caps.e2_cap, v * caps.f3_cap);
                    counters.evaluated += 1;
                    counters.degenerate += usize::from(e.re_e0e3.is_none());
                    counters.cs_clamps += usize::from(e.cs_clamped);
                    counters.lambda_clamps += usize::from(e.lambda_clamped);
                    if e.term < best.value {
                        best = Best { value: e.term, at: [q3, u, v] };
                    }
                }
            }
        }
        best
    }

    fn hidden(&self, at: [f64; 3]) -> HiddenParams {
        let caps = caps_for(&self.fwd, &self.noise, &self.g, self.alpha, self.beta, at[0]);
        HiddenParams { q3: at[0], e2_sq: at[1] * caps.e2_cap, f3_sq: at[2] * caps.f3_cap }
    }

    fn breakdown(&self, h: &HiddenParams) -> BoundBreakdown {
        let e = self.eval(h.q3, h.e2_sq, h.f3_sq);
        BoundBreakdown {
            q0: self.fwd.q0,
            q1: self.fwd.q1,
            q2: ForwardAmplitudes::q2_for(h.q3),
            q3: h.q3,
            g_norms: self.g,
            re_g1g3: self.re_g1g3,
            chi_abs_max: e.chi,
            re_e0e3: e.re_e0e3,
            re2_e0g0_lower: e.re2,
            lambda: e.lambda,
            sae_term: e.term,
        }
    }
}

/// Refined box: one grid step either side of `x` on an `n`-point axis.
fn shrink(x: f64, [lo, hi]: [f64; 2], n: usize) -> [f64; 2] {
    let step = (hi - lo) / (n - 1) as f64;
    [(x - step).max(lo), (x + step).min(hi)]
}

/// Lower bound on S(A|E), minimized over every hidden-parameter value
/// consistent with the statistics.
pub fn sae_lower(stats: &ObservedStatistics, alpha: f64, grid: &GridSpec) -> Result<SaeBound> {
    if !(0.0..=1.0).contains(&alpha) {
        return arg(format!("alpha = {alpha} outside [0, 1]"));
    }
    grid.validate()?;
    stats.validate()?;
    let mut diagnostics = BoundDiagnostics { symmetry_residual: stats.symmetry_residual(), ..Default::default() };
    let beta = (1.0 - alpha * alpha).sqrt();
    if beta <= 0.0 {
        diagnostics.degenerate_alpha = true;
        return Ok(SaeBound { value: 0.0, argmin: None, breakdown: None, grid_points_evaluated: 0, diagnostics });
    }
    diagnostics.degenerate_alpha = alpha == 0.0;

    let ctx = Context::new(stats, alpha, grid)?;
    diagnostics.assumption_violated = ctx.fwd.assumption_violated;
    diagnostics.infeasible = ctx.fwd.infeasible;

    let n = grid.points_per_axis;
    let mut counters = Counters::default();
    let mut bounds = [[ctx.fwd.q3_min, 1.0], [0.0, 1.0], [0.0, 1.0]];
    let mut best = ctx.search(n, bounds, &mut counters);
    for _ in 0..grid.refine_passes {
        bounds = [0, 1, 2].map(|k| shrink(best.at[k], bounds[k], n));
        let mut c = Counters::default();
        let cand = ctx.search(n, bounds, &mut c);
        counters.merge(&c);
        if cand.value < best.value {
            best = cand;
        }
    }

    diagnostics.degenerate_points = counters.degenerate;
    diagnostics.unconstrained_cap_points = counters.unconstrained;
    diagnostics.cauchy_schwarz_clamps = counters.cs_clamps;
    diagnostics.lambda_clamped_points = counters.lambda_clamps;
    let argmin = ctx.hidden(best.at);
    Ok(SaeBound {
        value: best.value,
        argmin: Some(argmin),
        breakdown: Some(ctx.breakdown(&argmin)),
        grid_points_evaluated: counters.evaluated,
        diagnostics,
    })
}

/// `H(A|B)` of the raw key: A's bit is 0 for `|0⟩` and 1 for `|a⟩`, each sent
/// with probability ½.
pub fn h_a_given_b(stats: &ObservedStatistics) -> Result<f64> {
    let joint = [stats.p_ab_0_0 / 2.0, stats.p_ab_0_1 / 2.0, stats.p_ab_a_0 / 2.0, stats.p_ab_a_1 / 2.0];
    let b0 = joint[0] + joint[2];
    Ok(shannon_entropy(&joint)? - shannon_entropy(&[b0, 1.0 - b0])?)
}

/// Asymptotic key rate `S(A|E) − H(A|B)` with the entropy bound in place of
/// `S(A|E)`.
pub fn key_rate(stats: &ObservedStatistics, alpha: f64, grid: &GridSpec) -> Result<KeyRateReport> {
    let sae = sae_lower(stats, alpha, grid)?;
    let hab = h_a_given_b(stats)?;
    Ok(KeyRateReport {
        alpha,
        p: stats.p,
        sae_lower: sae.value,
        hab,
        rate: sae.value - hab,
        argmin: sae.argmin,
        breakdown: sae.breakdown,
        grid_points_evaluated: sae.grid_points_evaluated,
        diagnostics: sae.diagnostics,
    })
}
