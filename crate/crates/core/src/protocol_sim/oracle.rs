use nalgebra::DMatrix;

use super::attack::{derive_reverse_vectors, g_from_reverse, RestrictedAttack};
use super::params::ProtocolParams;
use crate::error::{Error, Result};
use crate::qmath::{conditional_entropy, partial_trace, r, shannon_entropy, Operator, StateVector, C64};

/// Exact state of a key-distillation iteration and its entropies.
#[derive(Debug, Clone)]
pub struct ExactOracle {
    /// Registers ordered A (key bit), B (measurement), E (ancilla).
    pub rho_abe: Operator,
    pub sae_exact: f64,
    pub hab_exact: f64,
    /// Joint distribution of `(k_A, k_B)`, indexed `2·k_A + k_B`.
    pub joint_ab: [f64; 4],
}

fn add_block(rho: &mut DMatrix<C64>, slot: usize, d: usize, vectors: &[(&StateVector, f64)]) {
    let mut view = rho.view_mut((slot * d, slot * d), (d, d));
    for (v, w) in vectors {
        let col = v.as_dvector();
        view += col * col.adjoint() * r(*w);
    }
}

/// Assemble
///
/// ```text
/// ρ_ABE = ½|00⟩⟨00| ⊗ q0²(|e0⟩⟨e0| + |e1⟩⟨e1|) + ½|01⟩⟨01| ⊗ q1²(|f0⟩⟨f0| + |f1⟩⟨f1|)
///       + ½|10⟩⟨10| ⊗ (|g3⟩⟨g3| + |g2⟩⟨g2|)    + ½|11⟩⟨11| ⊗ (|g1⟩⟨g1| + |g0⟩⟨g0|)
/// ```
///
/// (the returning qubit is discarded by A) and evaluate S(A|E) and H(A|B).
pub fn build_rho_abe(attack: &RestrictedAttack, params: &ProtocolParams) -> Result<ExactOracle> {
    let d = attack.d_e();
    let rv = derive_reverse_vectors(attack)?;
    let g = g_from_reverse(attack, params, &rv);
    let [q0, q1, _, _] = attack.q();
    let (q0s, q1s) = (q0 * q0, q1 * q1);

    let mut rho = DMatrix::<C64>::zeros(4 * d, 4 * d);
    add_block(&mut rho, 0, d, &[(&rv.e[0], 0.5 * q0s), (&rv.e[1], 0.5 * q0s)]);
    add_block(&mut rho, 1, d, &[(&rv.f[0], 0.5 * q1s), (&rv.f[1], 0.5 * q1s)]);
    add_block(&mut rho, 2, d, &[(&g[3], 0.5), (&g[2], 0.5)]);
    add_block(&mut rho, 3, d, &[(&g[1], 0.5), (&g[0], 0.5)]);
    let rho_abe = Operator::new(rho, vec![2, 2, d])?;

    let tr = rho_abe.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(Error::Internal(format!("ρ_ABE has trace {tr}")));
    }

    let rho_ae = partial_trace(&rho_abe, &[0, 2])?;
    let sae_exact = conditional_entropy(&rho_ae, &[0], &[1])?;

    let rho_ab = partial_trace(&rho_abe, &[0, 1])?;
    let joint_ab = [0, 1, 2, 3].map(|k| rho_ab.entry(k, k).re);
    let b_marginal = [joint_ab[0] + joint_ab[2], joint_ab[1] + joint_ab[3]];
    let hab_exact = shannon_entropy(&joint_ab)? - shannon_entropy(&b_marginal)?;

    Ok(ExactOracle { rho_abe, sae_exact, hab_exact, joint_ab })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol_sim::attack::{random_attack, random_attack_near_identity};
    use crate::qmath::{binary_entropy, tensor};

    #[test]
    fn identity_attack_oracle() {
        for alpha in [0.1, 0.2, 0.5, 0.9] {
            let params = ProtocolParams::with_max_p(alpha).unwrap();
            let o = build_rho_abe(&RestrictedAttack::identity(4), &params).unwrap();
            let b2 = params.beta * params.beta;
            let want = [0.5, 0.0, alpha * alpha / 2.0, b2 / 2.0];
            for k in 0..4 {
                assert!((o.joint_ab[k] - want[k]).abs() < 1e-14);
            }
            assert!((o.sae_exact - 1.0).abs() < 1e-9);
            let hab = shannon_entropy(&want).unwrap() - binary_entropy((1.0 + alpha * alpha) / 2.0);
            assert!((o.hab_exact - hab).abs() < 1e-9);
        }
    }

    /// Independent route: evolve each (k_A, k_B) branch through U_R as a full
    /// transit ⊗ ancilla state and trace the transit out numerically.
    fn rho_by_evolution(attack: &RestrictedAttack, params: &ProtocolParams) -> Operator {
        let d = attack.d_e();
        let mut total = Operator::zeros(vec![2, 2, d]);
        for (ka, (c0, c1)) in [(1.0, 0.0), (params.alpha, params.beta)].into_iter().enumerate() {
            let phi = attack.forward(c0, c1);
            for kb in 0..2 {
                let branch = tensor(&StateVector::basis(2, kb), &phi.block(kb * d, d));
                let out = attack.reverse(&branch);
                let rho_e = partial_trace(&out.projector(), &[1]).unwrap();
                let reg = StateVector::basis(4, 2 * ka + kb).projector();
                let term = tensor(&reg, &rho_e).scale(r(0.5));
                total = total.add(&term).unwrap();
            }
        }
        total.with_dims(vec![2, 2, d]).unwrap()
    }

    #[test]
    fn rho_matches_direct_evolution() {
        for seed in 0..50 {
            let a = random_attack(if seed % 2 == 0 { 2 } else { 4 }, seed);
            let params = ProtocolParams::with_max_p(0.25).unwrap();
            let o = build_rho_abe(&a, &params).unwrap();
            let direct = rho_by_evolution(&a, &params);
            assert!(o.rho_abe.max_abs_diff(&direct) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn random_attack_oracle_is_valid() {
        for seed in 0..100 {
            let a = if seed % 2 == 0 { random_attack(4, seed) } else { random_attack_near_identity(4, seed, 0.15) };
            let params = ProtocolParams::with_max_p(0.3).unwrap();
            let o = build_rho_abe(&a, &params).unwrap();
            o.rho_abe.check_density().unwrap();
            assert!(o.sae_exact >= -1e-9);
            assert!((o.rho_abe.trace().re - 1.0).abs() < 1e-9);
            // classical registers: AB marginal diagonal
            let ab = partial_trace(&o.rho_abe, &[0, 1]).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        assert!(ab.entry(i, j).norm() < 1e-14);
                    }
                }
            }
        }
    }
}
