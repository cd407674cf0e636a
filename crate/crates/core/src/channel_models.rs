//! Observable statistics for symmetric attacks that look like depolarizing
//! channels `ρ ↦ (1 − 2Q)ρ + Q·I`.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::protocol_sim::{ObservedStatistics, ProtocolParams};

/// Forward (A→B), reverse (B→A) and loop (reflected round trip) noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoisePoint {
    pub q_f: f64,
    pub q_r: f64,
    pub q_x: f64,
}

impl NoisePoint {
    pub fn new(q_f: f64, q_r: f64, q_x: f64) -> Result<Self> {
        let n = Self { q_f, q_r, q_x };
        n.validate()?;
        Ok(n)
    }

    /// `Q_F = q_f`, `Q_R = Q_X = q`.
    pub fn forward_and_loop(q_f: f64, q: f64) -> Result<Self> {
        Self::new(q_f, q, q)
    }

    pub fn uniform(q: f64) -> Result<Self> {
        Self::new(q, q, q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("q_f", self.q_f), ("q_r", self.q_r), ("q_x", self.q_x)] {
            if !(0.0..=0.5).contains(&v) {
                return arg(format!("{name} = {v} outside [0, 0.5]"));
            }
        }
        Ok(())
    }
}

fn depolarize(q: f64, x: f64) -> f64 {
    (1.0 - 2.0 * q) * x + q
}

/// Statistics of the symmetric attack with noise `noise`, measured with POVM
/// scale `p`.
pub fn depolarize_statistics(alpha: f64, noise: NoisePoint, p: f64) -> Result<ObservedStatistics> {
    let params = ProtocolParams::new(alpha, p)?;
    noise.validate()?;
    let NoisePoint { q_f, q_r, q_x } = noise;
    let (a2, b2) = (alpha * alpha, params.beta * params.beta);
    let p_ab_a_0 = depolarize(q_f, a2);
    Ok(ObservedStatistics {
        p_ab_0_0: 1.0 - q_f,
        p_ab_0_1: q_f,
        p_ab_a_0,
        p_ab_a_1: 1.0 - p_ab_a_0,
        p_aa_0_0_0: p * (1.0 - q_r),
        p_aa_0_1_0: p * q_r,
        p_aa_a_0_0: p * (1.0 - q_r),
        p_aa_a_1_0: p * q_r,
        p_aa_a_0_a: p * depolarize(q_r, a2),
        p_aa_a_1_a: p * depolarize(q_r, b2),
        p_aa_a_r_a: p * (1.0 - q_x),
        p_aa_a_r_0: p * depolarize(q_x, a2),
        p,
    })
}

/// [`depolarize_statistics`] with the largest valid `p = 1/(1 + α)`.
pub fn depolarize_statistics_max_p(alpha: f64, noise: NoisePoint) -> Result<ObservedStatistics> {
    depolarize_statistics(alpha, noise, ProtocolParams::max_p(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol_sim::{simulate_statistics, RestrictedAttack};
    use proptest::prelude::*;

    #[test]
    fn noiseless_and_full_depolarization() {
        let s = depolarize_statistics_max_p(0.3, NoisePoint::default()).unwrap();
        assert!((s.p_ab_a_0 - 0.09).abs() < 1e-15);
        assert_eq!(s.p_aa_a_r_a, s.p);
        let full = depolarize_statistics_max_p(0.7, NoisePoint::new(0.5, 0.0, 0.0).unwrap()).unwrap();
        assert!((full.p_ab_a_0 - 0.5).abs() < 1e-15 && (full.p_ab_a_1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn substitution_example() {
        let s = depolarize_statistics_max_p(0.2, NoisePoint::new(0.01, 0.0, 0.0).unwrap()).unwrap();
        assert!((s.p_ab_a_0 - 0.0492).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(NoisePoint::new(0.6, 0.0, 0.0).is_err());
        assert!(NoisePoint::new(0.0, -0.1, 0.0).is_err());
        assert!(depolarize_statistics(0.5, NoisePoint::default(), 0.9).is_err());
        assert!(depolarize_statistics(1.1, NoisePoint::default(), 0.4).is_err());
    }

    #[test]
    fn zero_noise_matches_identity_attack() {
        for k in 0..=10 {
            let alpha = k as f64 / 10.0;
            let params = ProtocolParams::with_max_p(alpha).unwrap();
            let sim = simulate_statistics(&RestrictedAttack::identity(2), &params);
            let dep = depolarize_statistics(alpha, NoisePoint::default(), params.p).unwrap();
            let a = serde_json::to_value(sim).unwrap();
            let b = serde_json::to_value(dep).unwrap();
            for (key, va) in a.as_object().unwrap() {
                let (x, y) = (va.as_f64().unwrap(), b[key].as_f64().unwrap());
                assert!((x - y).abs() < 1e-12, "alpha {alpha} {key}: {x} vs {y}");
            }
        }
    }

    proptest! {
        #[test]
        fn statistics_are_valid(alpha in 0.0f64..=1.0, qf in 0.0f64..=0.5, qr in 0.0f64..=0.5, qx in 0.0f64..=0.5, t in 0.01f64..=1.0) {
            let p = t * ProtocolParams::max_p(alpha);
            let s = depolarize_statistics(alpha, NoisePoint::new(qf, qr, qx).unwrap(), p).unwrap();
            s.validate().unwrap();
            prop_assert!((s.p_ab_a_0 + s.p_ab_a_1 - 1.0).abs() < 1e-15);
            for v in [s.p_aa_0_0_0, s.p_aa_a_0_a, s.p_aa_a_1_a, s.p_aa_a_r_a, s.p_aa_a_r_0] {
                prop_assert!(v <= p + 1e-15);
            }
        }
    }
}
