use serde::{Deserialize, Serialize};

use super::attack::RestrictedAttack;
use super::params::ProtocolParams;
use crate::error::{Error, Result};
use crate::qmath::StateVector;

/// Below this, a conditioning event is treated as never occurring.
pub const NULL_EVENT: f64 = 1e-12;
const PROB_TOL: f64 = 1e-10;

/// Every statistic A and B can estimate.
///
/// `p_ab_x_k`: B measures `k` given A sent `x ∈ {0, a}`.
/// `p_aa_x_k_o`: A's POVM yields `o` given A sent `x` and B measured `k`
/// (`k = r` for reflection). The `p_aa_*` entries carry the POVM factor `p`,
/// so they never exceed `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedStatistics {
    pub p_ab_0_0: f64,
    pub p_ab_0_1: f64,
    pub p_ab_a_0: f64,
    pub p_ab_a_1: f64,
    pub p_aa_0_0_0: f64,
    pub p_aa_0_1_0: f64,
    pub p_aa_a_0_0: f64,
    pub p_aa_a_1_0: f64,
    pub p_aa_a_0_a: f64,
    pub p_aa_a_1_a: f64,
    pub p_aa_a_r_a: f64,
    pub p_aa_a_r_0: f64,
    pub p: f64,
}

impl ObservedStatistics {
    fn povm_entries(&self) -> [(&'static str, f64); 8] {
        [
            ("p_aa_0_0_0", self.p_aa_0_0_0),
            ("p_aa_0_1_0", self.p_aa_0_1_0),
            ("p_aa_a_0_0", self.p_aa_a_0_0),
            ("p_aa_a_1_0", self.p_aa_a_1_0),
            ("p_aa_a_0_a", self.p_aa_a_0_a),
            ("p_aa_a_1_a", self.p_aa_a_1_a),
            ("p_aa_a_r_a", self.p_aa_a_r_a),
            ("p_aa_a_r_0", self.p_aa_a_r_0),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Validity(format!("POVM scale p = {} outside (0, 1]", self.p)));
        }
        let forward = [
            ("p_ab_0_0", self.p_ab_0_0),
            ("p_ab_0_1", self.p_ab_0_1),
            ("p_ab_a_0", self.p_ab_a_0),
            ("p_ab_a_1", self.p_ab_a_1),
        ];
        for (name, v) in forward {
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
                return Err(Error::Validity(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in self.povm_entries() {
            if !(-PROB_TOL..=self.p + PROB_TOL).contains(&v) {
                return Err(Error::Validity(format!("{name} = {v} outside [0, p = {}]", self.p)));
            }
        }
        if (self.p_ab_0_0 + self.p_ab_0_1 - 1.0).abs() > 1e-9 {
            return Err(Error::Validity("p_ab_0_0 + p_ab_0_1 != 1".into()));
        }
        if (self.p_ab_a_0 + self.p_ab_a_1 - 1.0).abs() > 1e-9 {
            return Err(Error::Validity("p_ab_a_0 + p_ab_a_1 != 1".into()));
        }
        Ok(())
    }

    /// Reverse-channel noise read off the `|0⟩, 0, 0` statistic.
    pub fn q_r(&self) -> f64 {
        1.0 - self.p_aa_0_0_0 / self.p
    }

    /// Largest deviation from the symmetric-noise relations
    /// `p_aa_0_1_0 = p_aa_a_1_0 = p·Q_R` and `p_aa_a_0_0 = p·(1 − Q_R)`,
    /// measured on the `/p` scale.
    pub fn symmetry_residual(&self) -> f64 {
        let qr = self.q_r();
        [
            (self.p_aa_0_1_0 / self.p - qr).abs(),
            (self.p_aa_a_1_0 / self.p - qr).abs(),
            (self.p_aa_a_0_0 / self.p - (1.0 - qr)).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Same statistics gathered with a different POVM scale.
    pub fn rescaled(&self, new_p: f64) -> Self {
        let k = new_p / self.p;
        Self {
            p_aa_0_0_0: self.p_aa_0_0_0 * k,
            p_aa_0_1_0: self.p_aa_0_1_0 * k,
            p_aa_a_0_0: self.p_aa_a_0_0 * k,
            p_aa_a_1_0: self.p_aa_a_1_0 * k,
            p_aa_a_0_a: self.p_aa_a_0_a * k,
            p_aa_a_1_a: self.p_aa_a_1_a * k,
            p_aa_a_r_a: self.p_aa_a_r_a * k,
            p_aa_a_r_0: self.p_aa_a_r_0 * k,
            p: new_p,
            ..*self
        }
    }
}

/// POVM outcome probabilities `(p‖(⟨0|⊗I)ψ‖², p‖(⟨a|⊗I)ψ‖²)` on a
/// transit ⊗ ancilla state.
pub(crate) fn povm_outcomes(psi: &StateVector, params: &ProtocolParams, d: usize) -> (f64, f64) {
    let t0 = psi.block(0, d);
    let t1 = psi.block(d, d);
    let on_a = t0
        .scale_real(params.alpha)
        .add(&t1.scale_real(params.beta))
        .expect("ancilla blocks");
    (params.p * t0.norm_sqr(), params.p * on_a.norm_sqr())
}

/// Exact observable statistics of one iteration under `attack`.
///
/// Conditional statistics whose conditioning event has probability below
/// [`NULL_EVENT`] are filled with the symmetric default (`p·Q_R` for a
/// "0" outcome after B saw 1, `p·(1 − Q_R)` after B saw 0, and the
/// depolarizing value for the "a" outcomes); those entries are always
/// multiplied by the vanishing probability wherever they are used.
pub fn simulate_statistics(attack: &RestrictedAttack, params: &ProtocolParams) -> ObservedStatistics {
    let d = attack.d_e();
    let p = params.p;
    let (alpha, beta) = (params.alpha, params.beta);

    let sent_zero = attack.forward(1.0, 0.0);
    let sent_a = attack.forward(alpha, beta);

    // B measures k and resends |k⟩; returns P(k) and A's outcome probabilities.
    let measure_resend = |phi: &StateVector, k: usize| -> (f64, Option<(f64, f64)>) {
        let block = phi.block(k * d, d);
        let pk = block.norm_sqr();
        if pk < NULL_EVENT {
            return (pk, None);
        }
        let resent = crate::qmath::tensor(&StateVector::basis(2, k), &block.scale_real(1.0 / pk.sqrt()));
        (pk, Some(povm_outcomes(&attack.reverse(&resent), params, d)))
    };

    let (p00, o00) = measure_resend(&sent_zero, 0);
    let (p01, o01) = measure_resend(&sent_zero, 1);
    let (pa0, oa0) = measure_resend(&sent_a, 0);
    let (pa1, oa1) = measure_resend(&sent_a, 1);

    let qr = o00.map(|(z, _)| 1.0 - z / p).unwrap_or(0.0);
    let depol = |x: f64| (1.0 - 2.0 * qr) * x + qr;

    let (reflect_0, reflect_a) = povm_outcomes(&attack.reverse(&sent_a), params, d);

    ObservedStatistics {
        p_ab_0_0: p00,
        p_ab_0_1: p01,
        p_ab_a_0: pa0,
        p_ab_a_1: pa1,
        p_aa_0_0_0: o00.map_or(p, |o| o.0),
        p_aa_0_1_0: o01.map_or(p * qr, |o| o.0),
        p_aa_a_0_0: oa0.map_or(p * (1.0 - qr), |o| o.0),
        p_aa_a_1_0: oa1.map_or(p * qr, |o| o.0),
        p_aa_a_0_a: oa0.map_or(p * depol(alpha * alpha), |o| o.1),
        p_aa_a_1_a: oa1.map_or(p * depol(beta * beta), |o| o.1),
        p_aa_a_r_a: reflect_a,
        p_aa_a_r_0: reflect_0,
        p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol_sim::attack::{g_vectors, random_attack, random_attack_near_identity};

    #[test]
    fn identity_attack_statistics() {
        let params = ProtocolParams::with_max_p(0.5).unwrap();
        let s = simulate_statistics(&RestrictedAttack::identity(4), &params);
        s.validate().unwrap();
        assert!((s.p_ab_0_0 - 1.0).abs() < 1e-15);
        assert!((s.p_ab_a_1 - params.beta.powi(2)).abs() < 1e-15);
        assert!((s.p_aa_0_0_0 - params.p).abs() < 1e-15);
        assert!((s.p_aa_a_r_a - params.p).abs() < 1e-15);
        // B's measurement collapses |a⟩ onto |0⟩, which A then sees as "a" with prob α²
        let p = 2.0 / 3.0;
        assert!((params.p - p).abs() < 1e-15);
        assert!((s.p_aa_a_0_a / p - 0.25).abs() < 1e-14);
        // null event: A sent |0⟩ and B saw 1 never happens
        assert_eq!(s.p_ab_0_1, 0.0);
        assert!((s.p_aa_0_1_0 - 0.0).abs() < 1e-15);
    }

    #[test]
    fn forward_statistics_normalize() {
        for seed in 0..200 {
            let a = random_attack(4, seed);
            let params = ProtocolParams::with_max_p(0.37).unwrap();
            let s = simulate_statistics(&a, &params);
            s.validate().unwrap();
        }
    }

    #[test]
    fn g_norms_and_reflection_decomposition() {
        for seed in 0..200 {
            let a = if seed % 2 == 0 { random_attack(4, seed) } else { random_attack_near_identity(2, seed, 0.2) };
            let params = ProtocolParams::with_max_p(0.2 + 0.003 * seed as f64).unwrap();
            let s = simulate_statistics(&a, &params);
            let g = g_vectors(&a, &params).unwrap();
            let n: Vec<f64> = g.iter().map(|v| v.norm_sqr()).collect();
            assert!((n[2] + n[3] - s.p_ab_a_0).abs() < 1e-9);
            assert!((n[0] + n[1] - s.p_ab_a_1).abs() < 1e-9);
            if s.p_ab_a_0 > NULL_EVENT {
                assert!((n[3] - s.p_ab_a_0 * s.p_aa_a_0_0 / s.p).abs() < 1e-9);
            }
            if s.p_ab_a_1 > NULL_EVENT {
                assert!((n[0] - s.p_ab_a_1 * (1.0 - s.p_aa_a_1_0 / s.p)).abs() < 1e-9);
            }
            let g13 = g[1].add(&g[3]).unwrap();
            assert!((s.p_aa_a_r_0 - s.p * g13.norm_sqr()).abs() < 1e-9);
        }
    }

    #[test]
    fn rescaling_scales_povm_entries_only() {
        let params = ProtocolParams::with_max_p(0.3).unwrap();
        let s = simulate_statistics(&random_attack(2, 5), &params);
        let t = s.rescaled(0.5 * s.p);
        assert_eq!(t.p_ab_a_1, s.p_ab_a_1);
        assert!((t.p_aa_a_r_a * 2.0 - s.p_aa_a_r_a).abs() < 1e-15);
        assert!((t.q_r() - s.q_r()).abs() < 1e-15);
    }
}
