use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::params::ProtocolParams;
use crate::error::{arg, Error, Result};
use crate::qmath::{c, haar_unitary, inner, r, random_ket, tensor, Operator, StateVector};

const Q_TOL: f64 = 1e-10;
const CONSTRAINT_TOL: f64 = 1e-9;

/// Restricted collective attack: forward isometry
///
/// ```text
/// F|0⟩ = q0|0,0⟩ + q1|1,e⟩
/// F|1⟩ = q2|0,f⟩ + q3|1,0⟩
/// ```
///
/// followed by an arbitrary unitary `U_R` on transit ⊗ ancilla in the
/// reverse channel. `|0⟩_E` is the first ancilla basis vector.
#[derive(Debug, Clone)]
pub struct RestrictedAttack {
    q: [f64; 4],
    e: StateVector,
    f: StateVector,
    u_reverse: Operator,
}

/// `U_R` applied to the four forward-channel outputs, split by transit value:
/// `U_R|0,0⟩ = |0,e0⟩ + |1,e1⟩`, `U_R|1,0⟩ = |0,e2⟩ + |1,e3⟩`,
/// `U_R|1,e⟩ = |0,f0⟩ + |1,f1⟩`, `U_R|0,f⟩ = |0,f2⟩ + |1,f3⟩`.
#[derive(Debug, Clone)]
pub struct ReverseVectors {
    pub e: [StateVector; 4],
    pub f: [StateVector; 4],
}

impl ReverseVectors {
    /// Residuals of the four orthogonality relations forced by unitarity of `U_R`.
    pub fn unitarity_residuals(&self) -> [f64; 4] {
        let ip = |x: &StateVector, y: &StateVector| inner(x, y).expect("same ancilla dimension");
        let [e0, e1, e2, e3] = &self.e;
        let [f0, f1, f2, f3] = &self.f;
        [
            (ip(e0, e2) + ip(e1, e3)).norm(),
            (ip(f0, f2) + ip(f1, f3)).norm(),
            (ip(e0, f0) + ip(e1, f1)).norm(),
            (ip(e2, f2) + ip(e3, f3)).norm(),
        ]
    }
}

impl RestrictedAttack {
    pub fn new(q: [f64; 4], e: StateVector, f: StateVector, u_reverse: Operator) -> Result<Self> {
        let [q0, q1, q2, q3] = q;
        if q.iter().any(|&x| !(x >= 0.0) || x > 1.0 + Q_TOL) {
            return arg(format!("forward amplitudes {q:?} must lie in [0, 1]"));
        }
        if (q0 * q0 + q1 * q1 - 1.0).abs() > Q_TOL || (q2 * q2 + q3 * q3 - 1.0).abs() > Q_TOL {
            return arg(format!("forward amplitudes {q:?} violate q0²+q1² = q2²+q3² = 1"));
        }
        let d = e.len();
        if d < 2 || f.len() != d {
            return arg(format!("ancilla vectors must share a dimension ≥ 2 (got {} and {})", e.len(), f.len()));
        }
        if (e.norm_sqr() - 1.0).abs() > Q_TOL || (f.norm_sqr() - 1.0).abs() > Q_TOL {
            return arg("ancilla vectors |e⟩ and |f⟩ must be normalized");
        }
        if u_reverse.dim() != 2 * d {
            return arg(format!("reverse unitary has dimension {}, expected {}", u_reverse.dim(), 2 * d));
        }
        let u_res = u_reverse.unitarity_residual();
        if u_res > Q_TOL {
            return Err(Error::Validity(format!("reverse operator is not unitary (residual {u_res:e})")));
        }
        let iso = isometry_residual(q, &e, &f);
        if iso > Q_TOL {
            return Err(Error::Validity(format!("forward map is not an isometry (⟨F0|F1⟩ = {iso:e})")));
        }
        let u_reverse = u_reverse.with_dims(vec![2, d])?;
        Ok(Self { q, e, f, u_reverse })
    }

    /// No attack: `F` and `U_R` act as identity.
    pub fn identity(d_e: usize) -> Self {
        let zero = StateVector::basis(d_e, 0);
        Self::new([1.0, 0.0, 0.0, 1.0], zero.clone(), zero, Operator::identity(2 * d_e))
            .expect("identity attack is valid")
    }

    pub fn q(&self) -> [f64; 4] {
        self.q
    }

    pub fn e(&self) -> &StateVector {
        &self.e
    }

    pub fn f(&self) -> &StateVector {
        &self.f
    }

    pub fn u_reverse(&self) -> &Operator {
        &self.u_reverse
    }

    pub fn d_e(&self) -> usize {
        self.e.len()
    }

    /// `F|ψ⟩` on transit ⊗ ancilla for a real transit state `c0|0⟩ + c1|1⟩`.
    pub fn forward(&self, c0: f64, c1: f64) -> StateVector {
        let d = self.d_e();
        let [q0, q1, q2, q3] = self.q;
        let mut amps = vec![r(0.0); 2 * d];
        // transit 0 block: c0 q0 |0⟩_E + c1 q2 |f⟩
        amps[0] += r(c0 * q0);
        for (slot, f) in amps[..d].iter_mut().zip(self.f.amplitudes().iter()) {
            *slot += f * (c1 * q2);
        }
        // transit 1 block: c0 q1 |e⟩ + c1 q3 |0⟩_E
        for (slot, e) in amps[d..].iter_mut().zip(self.e.amplitudes().iter()) {
            *slot += e * (c0 * q1);
        }
        amps[d] += r(c1 * q3);
        StateVector::new(amps, vec![2, d]).expect("2·d amplitudes")
    }

    pub fn reverse(&self, v: &StateVector) -> StateVector {
        self.u_reverse.apply(v).expect("transit ⊗ ancilla vector")
    }
}

fn isometry_residual(q: [f64; 4], e: &StateVector, f: &StateVector) -> f64 {
    let [q0, q1, q2, q3] = q;
    // ⟨F0|F1⟩ = q0 q2 ⟨0|f⟩ + q1 q3 ⟨e|0⟩
    (f.amplitudes()[0] * (q0 * q2) + e.amplitudes()[0].conj() * (q1 * q3)).norm()
}

/// Transit-split blocks of `U_R` applied to a transit ⊗ ancilla vector.
fn split(attack: &RestrictedAttack, v: &StateVector) -> (StateVector, StateVector) {
    let d = attack.d_e();
    let out = attack.reverse(v);
    (out.block(0, d), out.block(d, d))
}

pub fn derive_reverse_vectors(attack: &RestrictedAttack) -> Result<ReverseVectors> {
    let res = attack.u_reverse.unitarity_residual();
    if res > Q_TOL {
        return Err(Error::Validity(format!("reverse operator is not unitary (residual {res:e})")));
    }
    let d = attack.d_e();
    let t0 = StateVector::basis(2, 0);
    let t1 = StateVector::basis(2, 1);
    let zero_e = StateVector::basis(d, 0);
    let lift = |t: &StateVector, v: &StateVector| tensor(t, v);
    let (e0, e1) = split(attack, &lift(&t0, &zero_e));
    let (e2, e3) = split(attack, &lift(&t1, &zero_e));
    let (f0, f1) = split(attack, &lift(&t1, &attack.e));
    let (f2, f3) = split(attack, &lift(&t0, &attack.f));
    Ok(ReverseVectors { e: [e0, e1, e2, e3], f: [f0, f1, f2, f3] })
}

/// The four ancilla states A's key bit 1 leaves with Eve:
///
/// ```text
/// g0 = q1 α f1 + q3 β e3      g1 = q1 α f0 + q3 β e2
/// g2 = q0 α e1 + q2 β f3      g3 = q0 α e0 + q2 β f2
/// ```
pub fn g_vectors(attack: &RestrictedAttack, params: &ProtocolParams) -> Result<[StateVector; 4]> {
    let rv = derive_reverse_vectors(attack)?;
    Ok(g_from_reverse(attack, params, &rv))
}

pub(crate) fn g_from_reverse(
    attack: &RestrictedAttack,
    params: &ProtocolParams,
    rv: &ReverseVectors,
) -> [StateVector; 4] {
    let [q0, q1, q2, q3] = attack.q;
    let (a, b) = (params.alpha, params.beta);
    let comb = |x: &StateVector, cx: f64, y: &StateVector, cy: f64| {
        x.scale_real(cx).add(&y.scale_real(cy)).expect("same ancilla dimension")
    };
    let [e0, e1, e2, e3] = &rv.e;
    let [f0, f1, f2, f3] = &rv.f;
    [
        comb(f1, q1 * a, e3, q3 * b),
        comb(f0, q1 * a, e2, q3 * b),
        comb(e1, q0 * a, f3, q2 * b),
        comb(e0, q0 * a, f2, q2 * b),
    ]
}

/// Check every invariant of a restricted attack, including the derived
/// unitarity relations. Returns the largest residual seen.
pub fn attack_residual(attack: &RestrictedAttack) -> Result<f64> {
    let [q0, q1, q2, q3] = attack.q;
    let mut worst = (q0 * q0 + q1 * q1 - 1.0).abs().max((q2 * q2 + q3 * q3 - 1.0).abs());
    worst = worst.max(isometry_residual(attack.q, &attack.e, &attack.f));
    worst = worst.max(attack.u_reverse.unitarity_residual());
    let rv = derive_reverse_vectors(attack)?;
    for res in rv.unitarity_residuals() {
        worst = worst.max(res);
    }
    for (x, y) in [(0, 1), (2, 3)] {
        worst = worst.max((rv.e[x].norm_sqr() + rv.e[y].norm_sqr() - 1.0).abs());
        worst = worst.max((rv.f[x].norm_sqr() + rv.f[y].norm_sqr() - 1.0).abs());
    }
    if worst > CONSTRAINT_TOL {
        return Err(Error::Validity(format!("attack invariant residual {worst:e}")));
    }
    Ok(worst)
}

/// Random restricted attack, reproducible from `seed`. `q0, q3` are uniform
/// on `[0, 1]`, `|e⟩, |f⟩` uniform on the sphere (with `⟨0|f⟩` corrected so
/// `F` is an isometry) and `U_R` Haar-distributed.
pub fn random_attack(d_e: usize, seed: u64) -> RestrictedAttack {
    assert!(d_e >= 2, "ancilla dimension must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let q0: f64 = rng.random_range(0.0..=1.0);
        let q3: f64 = rng.random_range(0.0..=1.0);
        let e = random_ket(&mut rng, d_e);
        let f = random_ket(&mut rng, d_e);
        let u = haar_unitary(&mut rng, 2 * d_e);
        if let Some(a) = assemble(q0, q3, e, f, u) {
            return a;
        }
    }
}

/// Random attack in a neighbourhood of the identity: forward flip angles up
/// to `strength · π/2` and `U_R` the unitary factor of `I + strength · G` for
/// a complex Gaussian `G`. Small strengths give low-noise statistics where
/// the analytic bound is non-trivial.
pub fn random_attack_near_identity(d_e: usize, seed: u64, strength: f64) -> RestrictedAttack {
    assert!(d_e >= 2, "ancilla dimension must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_pi = std::f64::consts::FRAC_PI_2;
    loop {
        let q0 = (rng.random_range(0.0..=strength) * half_pi).cos();
        let q3 = (rng.random_range(0.0..=strength) * half_pi).cos();
        let e = random_ket(&mut rng, d_e);
        let f = random_ket(&mut rng, d_e);
        let n = 2 * d_e;
        let g = DMatrix::from_fn(n, n, |i, j| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let id = if i == j { 1.0 } else { 0.0 };
            c(id + strength * re, strength * im)
        });
        let (mut qm, rm) = g.qr().unpack();
        for j in 0..n {
            let dj = rm[(j, j)];
            if dj.norm() > 0.0 {
                let phase = dj / r(dj.norm());
                for i in 0..n {
                    qm[(i, j)] *= phase;
                }
            }
        }
        let u = Operator::from_matrix(qm).expect("square");
        if let Some(a) = assemble(q0, q3, e, f, u) {
            return a;
        }
    }
}

fn assemble(
    q0: f64,
    q3: f64,
    mut e: StateVector,
    mut f: StateVector,
    u: Operator,
) -> Option<RestrictedAttack> {
    let q1 = (1.0 - q0 * q0).max(0.0).sqrt();
    let q2 = (1.0 - q3 * q3).max(0.0).sqrt();
    let d = e.len();
    if q0 * q2 > 1e-9 {
        // solve q0 q2 ⟨0|f⟩ = -q1 q3 ⟨e|0⟩ for the first amplitude of f
        let target = -e.amplitudes()[0].conj() * (q1 * q3 / (q0 * q2));
        if target.norm() > 1.0 - 1e-9 {
            return None;
        }
        let rest: f64 = f.amplitudes()[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rest < 1e-9 {
            return None;
        }
        let scale = (1.0 - target.norm_sqr()).sqrt() / rest;
        let mut amps = vec![target];
        amps.extend(f.amplitudes()[1..].iter().map(|z| z * scale));
        f = StateVector::from_amps(amps);
    } else if q1 * q3 > 1e-9 {
        // F|0⟩ and F|1⟩ overlap only through ⟨e|0⟩, so |e⟩ must avoid |0⟩_E
        let mut amps = e.amplitudes().to_vec();
        amps[0] = r(0.0);
        e = StateVector::from_amps(amps).normalized().ok()?;
    }
    debug_assert_eq!(f.len(), d);
    RestrictedAttack::new([q0, q1, q2, q3], e, f, u).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit_flip(d: usize) -> Operator {
        let x = Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        crate::qmath::tensor(&x, &Operator::identity(d))
    }

    #[test]
    fn identity_attack_vectors() {
        let rv = derive_reverse_vectors(&RestrictedAttack::identity(4)).unwrap();
        let zero = StateVector::basis(4, 0);
        assert!(rv.e[0].max_abs_diff(&zero) < 1e-15);
        assert!(rv.e[1].norm_sqr() < 1e-30);
        assert!(rv.e[2].norm_sqr() < 1e-30);
        assert!(rv.e[3].max_abs_diff(&zero) < 1e-15);
    }

    #[test]
    fn bit_flip_swaps_transit() {
        let zero = StateVector::basis(3, 0);
        let a = RestrictedAttack::new([1.0, 0.0, 0.0, 1.0], zero.clone(), zero.clone(), bit_flip(3)).unwrap();
        let rv = derive_reverse_vectors(&a).unwrap();
        assert!(rv.e[0].norm_sqr() < 1e-30);
        assert!(rv.e[1].max_abs_diff(&zero) < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_reverse() {
        let zero = StateVector::basis(2, 0);
        let bad = Operator::identity(4).scale(r(1.1));
        let err = RestrictedAttack::new([1.0, 0.0, 0.0, 1.0], zero.clone(), zero, bad).unwrap_err();
        assert!(matches!(err, Error::Validity(_)));
    }

    #[test]
    fn rejects_broken_isometry() {
        let zero = StateVector::basis(2, 0);
        let s = 0.5f64.sqrt();
        let err = RestrictedAttack::new([s, s, s, s], zero.clone(), zero, Operator::identity(4)).unwrap_err();
        assert!(matches!(err, Error::Validity(_)));
    }

    #[test]
    fn identity_corner_accepts_any_ancilla_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let e = random_ket(&mut rng, 4);
            let f = random_ket(&mut rng, 4);
            assert!(RestrictedAttack::new([1.0, 0.0, 0.0, 1.0], e, f, Operator::identity(8)).is_ok());
        }
    }

    #[test]
    fn random_attack_is_deterministic() {
        let a = random_attack(4, 99);
        let b = random_attack(4, 99);
        assert_eq!(a.q(), b.q());
        assert_eq!(a.e(), b.e());
        assert_eq!(a.f(), b.f());
        assert_eq!(a.u_reverse(), b.u_reverse());
        assert_ne!(random_attack(4, 100).q(), a.q());
    }

    #[test]
    fn seeded_draws_satisfy_invariants() {
        for seed in 0..1000u64 {
            let d = if seed % 2 == 0 { 2 } else { 4 };
            attack_residual(&random_attack(d, seed)).unwrap();
            attack_residual(&random_attack_near_identity(d, seed, 0.1)).unwrap();
        }
    }

    #[test]
    fn g_vectors_for_identity_attack() {
        let a = RestrictedAttack::identity(4);
        let p0 = ProtocolParams::with_max_p(0.0).unwrap();
        let g = g_vectors(&a, &p0).unwrap();
        assert!(g[0].max_abs_diff(&StateVector::basis(4, 0)) < 1e-15);
        for gi in &g[1..] {
            assert!(gi.norm_sqr() < 1e-30);
        }
        let p = ProtocolParams::with_max_p(0.35).unwrap();
        let g = g_vectors(&a, &p).unwrap();
        assert!((g[3].norm_sqr() - 0.35f64.powi(2)).abs() < 1e-14);
        assert!((g[0].norm_sqr() - p.beta.powi(2)).abs() < 1e-14);
    }
}
