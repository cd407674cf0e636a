use crate::error::{arg, Result};
use crate::qmath::binary_entropy;

const CS_TOL: f64 = 1e-12;

/// `λ(x, y) = ½(1 + √((‖x‖² − ‖y‖²)² + 4 Re²⟨x|y⟩) / (‖x‖² + ‖y‖²))`.
pub fn lambda_fn(norm_x_sq: f64, norm_y_sq: f64, re_inner: f64) -> Result<f64> {
    if norm_x_sq < 0.0 || norm_y_sq < 0.0 {
        return arg(format!("negative squared norms ({norm_x_sq}, {norm_y_sq})"));
    }
    let total = norm_x_sq + norm_y_sq;
    if total <= 0.0 {
        return arg("λ is undefined when both vectors vanish");
    }
    if re_inner * re_inner > norm_x_sq * norm_y_sq + CS_TOL {
        return arg(format!(
            "Re⟨x|y⟩ = {re_inner} violates Cauchy–Schwarz for norms² {norm_x_sq}, {norm_y_sq}"
        ));
    }
    Ok(lambda_unchecked(norm_x_sq, norm_y_sq, re_inner))
}

/// λ without domain checks, clamped to `[½, 1]`. Used inside the grid loop
/// where inputs are already known to be in range.
#[inline]
pub(crate) fn lambda_unchecked(nx: f64, ny: f64, re_inner: f64) -> f64 {
    let diff = nx - ny;
    let root = (diff * diff + 4.0 * re_inner * re_inner).sqrt();
    (0.5 * (1.0 + root / (nx + ny))).clamp(0.5, 1.0)
}

/// One `(|E_i⟩, |F_i⟩)` pair of a classical-quantum state
/// `(1/N)|0⟩⟨0| ⊗ Σ|E_i⟩⟨E_i| + (1/N)|1⟩⟨1| ⊗ Σ|F_i⟩⟨F_i|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqPair {
    pub norm_e_sq: f64,
    pub norm_f_sq: f64,
    pub re_inner: f64,
}

impl CqPair {
    pub fn new(norm_e_sq: f64, norm_f_sq: f64, re_inner: f64) -> Self {
        Self { norm_e_sq, norm_f_sq, re_inner }
    }

    /// `((‖E‖² + ‖F‖²)/N) · (H[‖E‖²/(‖E‖² + ‖F‖²)] − H[λ])`, zero for an
    /// empty pair.
    pub(crate) fn contribution(&self, n: f64, lambda: f64) -> f64 {
        let total = self.norm_e_sq + self.norm_f_sq;
        if total <= 1e-15 {
            return 0.0;
        }
        total / n * (binary_entropy(self.norm_e_sq / total) - binary_entropy(lambda))
    }
}

/// Lower bound on S(A|E) from any subset `J` of the pairs. Each pair's term is
/// a conditional entropy of a cq state and hence non-negative, so dropping
/// pairs keeps the bound valid.
pub fn theorem1_bound(pairs: &[CqPair], n: f64, subset: &[usize]) -> Result<f64> {
    if !(n > 0.0) {
        return arg(format!("normalization N = {n} must be positive"));
    }
    let total: f64 = pairs.iter().map(|p| p.norm_e_sq + p.norm_f_sq).sum();
    if (total - n).abs() > 1e-9 {
        return arg(format!("normalization N = {n} does not match Σ‖E_i‖² + ‖F_i‖² = {total}"));
    }
    let mut sum = 0.0;
    for &i in subset {
        let Some(pair) = pairs.get(i) else {
            return arg(format!("subset index {i} out of range for {} pairs", pairs.len()));
        };
        if pair.norm_e_sq + pair.norm_f_sq <= 1e-15 {
            continue;
        }
        let lambda = lambda_fn(pair.norm_e_sq, pair.norm_f_sq, pair.re_inner)?;
        sum += pair.contribution(n, lambda);
    }
    Ok(sum)
}
