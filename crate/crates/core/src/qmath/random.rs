use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, r, Operator, StateVector, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> StateVector {
    loop {
        let v = StateVector::from_amps((0..dim).map(|_| gaussian(rng)).collect());
        if let Ok(n) = v.normalized() {
            return n;
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` folded back into `Q`.
pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..dim {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / r(d.norm()) } else { r(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator::from_matrix(q).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 4, 8] {
            assert!(haar_unitary(&mut rng, n).unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn random_ket_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(random_ket(&mut rng, 5).is_normalized());
    }
}
