use super::linalg::{eig_hermitian, partial_trace, Operator};
use crate::error::{arg, Error, Result};

const ZERO_EIG: f64 = 1e-12;
const PROB_TOL: f64 = 1e-9;

fn xlog2x(p: f64) -> f64 {
    if p <= ZERO_EIG {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits. Entries may undershoot zero by 1e-12 (clamped).
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut h = 0.0;
    for &x in p {
        if !(-1e-12..=1.0 + PROB_TOL).contains(&x) {
            return arg(format!("probability {x} outside [0, 1]"));
        }
        let x = x.clamp(0.0, 1.0);
        sum += x;
        h += if x > 0.0 { -x * x.log2() } else { 0.0 };
    }
    if sum > 1.0 + PROB_TOL {
        return arg(format!("probabilities sum to {sum} > 1"));
    }
    Ok(h)
}

/// Binary entropy `H(x) = H(x, 1 - x)`; the argument is clamped to `[0, 1]`.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    h
}

/// `S(ρ) = -tr(ρ log₂ ρ)`.
pub fn von_neumann_entropy(rho: &Operator) -> Result<f64> {
    rho.check_density()?;
    let eig = eig_hermitian(rho)?;
    Ok(eig
        .values
        .iter()
        .map(|&l| xlog2x(l.max(0.0)))
        .sum())
}

/// `S(A|E) = S(AE) - S(E)`. Every factor of `rho` must appear in exactly one
/// of the two lists; trace out anything else beforehand.
pub fn conditional_entropy(rho: &Operator, a_factors: &[usize], e_factors: &[usize]) -> Result<f64> {
    let nf = rho.dims().len();
    let mut seen = vec![false; nf];
    for &k in a_factors.iter().chain(e_factors) {
        if k >= nf {
            return arg(format!("factor index {k} out of range for {nf} factors"));
        }
        if seen[k] {
            return arg(format!("factor {k} listed twice"));
        }
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return arg(format!("factor {k} is in neither the A nor the E list"));
    }
    if a_factors.is_empty() {
        return arg("conditional entropy needs at least one A factor");
    }
    let s_ae = von_neumann_entropy(rho)?;
    if e_factors.is_empty() {
        return Ok(s_ae);
    }
    let rho_e = partial_trace(rho, e_factors)?;
    let s_e = von_neumann_entropy(&rho_e)?;
    let out = s_ae - s_e;
    if out.is_nan() {
        return Err(Error::Validity("entropy evaluation produced NaN".into()));
    }
    Ok(out)
}
