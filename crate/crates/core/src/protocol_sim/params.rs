use crate::error::{arg, Result};
use crate::qmath::{eig_hermitian, Operator, StateVector, EIG_FLOOR};

/// Public protocol constants: the quantumness knob α and the POVM scale p.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProtocolParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    /// Probability that B measures and resends. Only used by sampling
    /// simulations; the conditional statistics do not depend on it.
    pub q: f64,
}

impl ProtocolParams {
    /// Largest POVM scale that keeps `Λ_?` positive semi-definite.
    pub fn max_p(alpha: f64) -> f64 {
        1.0 / (1.0 + alpha)
    }

    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        Self::with_q(alpha, p, 0.5)
    }

    pub fn with_q(alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return arg(format!("alpha = {alpha} outside [0, 1]"));
        }
        if !(p > 0.0 && p <= Self::max_p(alpha) + 1e-12) {
            return arg(format!("p = {p} outside (0, 1/(1+alpha)] for alpha = {alpha}"));
        }
        if !(q > 0.0 && q < 1.0) {
            return arg(format!("q = {q} outside (0, 1)"));
        }
        Ok(Self { alpha, beta: (1.0 - alpha * alpha).sqrt(), p, q })
    }

    /// α with the maximal allowed p.
    pub fn with_max_p(alpha: f64) -> Result<Self> {
        Self::new(alpha, Self::max_p(alpha.clamp(0.0, 1.0)))
    }

    /// `|a⟩ = α|0⟩ + β|1⟩`.
    pub fn ket_a(&self) -> StateVector {
        StateVector::from_real(&[self.alpha, self.beta])
    }

    /// `|ā⟩`, orthogonal to `|a⟩`.
    pub fn ket_a_bar(&self) -> StateVector {
        StateVector::from_real(&[-self.beta, self.alpha])
    }

    pub fn povm(&self) -> Povm {
        Povm::new(self.alpha, self.p)
    }
}

/// A's three-outcome measurement `{Λ₀, Λ_a, Λ_?}`.
#[derive(Debug, Clone)]
pub struct Povm {
    pub zero: Operator,
    pub a: Operator,
    pub inconclusive: Operator,
}

impl Povm {
    /// Built for any `p`; use [`Povm::is_valid`] to check positivity.
    pub fn new(alpha: f64, p: f64) -> Self {
        let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
        let zero = StateVector::basis(2, 0).projector().scale(p.into());
        let a = StateVector::from_real(&[alpha, beta]).projector().scale(p.into());
        let inconclusive = Operator::identity(2)
            .sub(&zero)
            .and_then(|m| m.sub(&a))
            .expect("2x2 operators");
        Self { zero, a, inconclusive }
    }

    /// Smallest eigenvalue of `Λ_?`.
    pub fn min_inconclusive_eigenvalue(&self) -> f64 {
        eig_hermitian(&self.inconclusive).expect("Hermitian by construction").values[0]
    }

    pub fn is_valid(&self) -> bool {
        self.min_inconclusive_eigenvalue() >= -EIG_FLOOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        let p = ProtocolParams::with_max_p(0.6).unwrap();
        assert!((p.alpha.powi(2) + p.beta.powi(2) - 1.0).abs() < 1e-12);
        assert!(ProtocolParams::new(0.5, 0.7).is_err());
        assert!(ProtocolParams::new(0.5, 0.0).is_err());
        assert!(ProtocolParams::new(1.2, 0.4).is_err());
        assert!(ProtocolParams::with_q(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn povm_threshold() {
        for k in 0..=10 {
            let alpha = k as f64 / 10.0;
            assert!(Povm::new(alpha, 1.0 / (1.0 + alpha)).is_valid(), "alpha {alpha}");
            assert!(!Povm::new(alpha, 1.02 / (1.0 + alpha)).is_valid(), "alpha {alpha}");
        }
    }

    #[test]
    fn povm_elements_sum_to_identity() {
        let m = Povm::new(0.3, 0.7);
        let s = m.zero.add(&m.a).unwrap().add(&m.inconclusive).unwrap();
        assert!(s.max_abs_diff(&Operator::identity(2)) < 1e-15);
    }
}
