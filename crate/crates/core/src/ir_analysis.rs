//! Intercept-resend attack on the variant where A measures returning qubits
//! projectively in `{|a⟩, |ā⟩}`.
//!
//! On key rounds B measures Z and resends `|k_B⟩`. Eve intercepts the return
//! trip, measures it in `{|a⟩, |ā⟩}` and guesses 1 on outcome `a`. Her
//! register is classical, so the key rate is `H(A|E) − H(A|B)`.

use serde::{Deserialize, Serialize};

use crate::qmath::shannon_entropy;

/// Joint distribution of `(k_A, k_B, guess)`, indexed `4·k_A + 2·k_B + guess`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IRJoint {
    pub p_abe: [f64; 8],
}

impl IRJoint {
    pub fn get(&self, k_a: usize, k_b: usize, guess: usize) -> f64 {
        self.p_abe[4 * k_a + 2 * k_b + guess]
    }

    /// `P(k_A, guess)`, indexed `2·k_A + guess`.
    pub fn p_ae(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| {
            let (ka, g) = (i / 2, i % 2);
            self.get(ka, 0, g) + self.get(ka, 1, g)
        })
    }

    /// `P(k_A, k_B)`, indexed `2·k_A + k_B`.
    pub fn p_ab(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| {
            let (ka, kb) = (i / 2, i % 2);
            self.get(ka, kb, 0) + self.get(ka, kb, 1)
        })
    }

    pub fn h_a_given_e(&self) -> f64 {
        conditional(&self.p_ae())
    }

    pub fn h_a_given_b(&self) -> f64 {
        conditional(&self.p_ab())
    }
}

/// `H(X|Y)` for a joint indexed `2·x + y`.
fn conditional(joint: &[f64; 4]) -> f64 {
    let y = [joint[0] + joint[2], joint[1] + joint[3]];
    (shannon_entropy(joint).expect("valid table") - shannon_entropy(&y).expect("valid marginal")).max(0.0)
}

/// Exact branch table for the noiseless attack. α outside `[0, 1]` is
/// clamped.
pub fn ir_joint(alpha: f64) -> IRJoint {
    let alpha = alpha.clamp(0.0, 1.0);
    let a2 = alpha * alpha;
    let b2 = 1.0 - a2;
    // P(k_B | k_A) and P(Eve sees a | k_B)
    let measure = [[1.0, 0.0], [a2, b2]];
    let eve_a = [a2, b2];
    let mut p_abe = [0.0; 8];
    for ka in 0..2 {
        for kb in 0..2 {
            let branch = 0.5 * measure[ka][kb];
            p_abe[4 * ka + 2 * kb + 1] = branch * eve_a[kb];
            p_abe[4 * ka + 2 * kb] = branch * (1.0 - eve_a[kb]);
        }
    }
    IRJoint { p_abe }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IRPoint {
    pub alpha: f64,
    pub h_a_e: f64,
    pub h_a_b: f64,
    pub rate: f64,
}

pub fn ir_point(alpha: f64) -> IRPoint {
    let j = ir_joint(alpha);
    let (h_a_e, h_a_b) = (j.h_a_given_e(), j.h_a_given_b());
    IRPoint { alpha, h_a_e, h_a_b, rate: h_a_e - h_a_b }
}

pub fn ir_key_rate(alpha: f64) -> f64 {
    ir_point(alpha).rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol_sim::ProtocolParams;
    use crate::qmath::{inner, StateVector};

    /// Branch tree walked with explicit state vectors.
    fn enumerate(alpha: f64) -> [f64; 8] {
        let params = ProtocolParams::with_max_p(alpha).unwrap();
        let sent = [StateVector::basis(2, 0), params.ket_a()];
        let eve = [params.ket_a_bar(), params.ket_a()];
        let mut t = [0.0; 8];
        for ka in 0..2 {
            for kb in 0..2 {
                let resent = StateVector::basis(2, kb);
                let pb = inner(&resent, &sent[ka]).unwrap().norm_sqr();
                for g in 0..2 {
                    let pe = inner(&eve[g], &resent).unwrap().norm_sqr();
                    t[4 * ka + 2 * kb + g] = 0.5 * pb * pe;
                }
            }
        }
        t
    }

    #[test]
    fn table_matches_enumeration() {
        for k in 0..=20 {
            let alpha = k as f64 / 20.0;
            let j = ir_joint(alpha);
            let want = enumerate(alpha);
            for i in 0..8 {
                assert!((j.p_abe[i] - want[i]).abs() < 1e-15, "alpha {alpha} entry {i}");
            }
            assert!((j.p_abe.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let a0: f64 = j.p_abe[..4].iter().sum();
            assert!((a0 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints() {
        let j0 = ir_joint(0.0);
        // guess always equals k_A
        assert_eq!(j0.get(0, 0, 1), 0.0);
        assert_eq!(j0.get(1, 1, 0), 0.0);
        let j1 = ir_joint(1.0);
        assert_eq!(j1.get(1, 1, 0) + j1.get(1, 1, 1), 0.0);
        assert!(ir_key_rate(0.0).abs() < 1e-12);
        assert!(ir_key_rate(1.0).abs() < 1e-12);
    }

    #[test]
    fn half_alpha_table() {
        let j = ir_joint(0.5);
        let want = [0.375, 0.125, 0.0, 0.0, 0.09375, 0.03125, 0.09375, 0.28125];
        for i in 0..8 {
            assert!((j.p_abe[i] - want[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn entropies_in_unit_interval() {
        for k in 0..=100 {
            let p = ir_point(k as f64 / 100.0);
            assert!((0.0..=1.0).contains(&p.h_a_e) && (0.0..=1.0).contains(&p.h_a_b));
        }
    }
}
