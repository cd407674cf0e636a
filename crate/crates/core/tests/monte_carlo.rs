//! Sampled protocol runs against the exact conditional statistics.

use alphasqkd::protocol_sim::{random_attack, simulate_statistics, ProtocolParams, RestrictedAttack};
use alphasqkd::qmath::{tensor, Operator, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `[P(0), P(a), P(?)]` of A's POVM on a returned transit ⊗ ancilla state.
fn povm_distribution(psi: &StateVector, params: &ProtocolParams, d: usize) -> [f64; 3] {
    let povm = params.povm();
    let id = Operator::identity(d);
    let expect = |m: &Operator| {
        let full = tensor(m, &id);
        alphasqkd::qmath::inner(psi, &full.apply(psi).unwrap()).unwrap().re
    };
    let (z, a) = (expect(&povm.zero), expect(&povm.a));
    [z, a, (1.0 - z - a).max(0.0)]
}

/// Per-branch outcome distributions: `measured[x][k]`, `reflected[x]`, and
/// `P(k | x)`.
struct Branches {
    p_k: [[f64; 2]; 2],
    measured: [[[f64; 3]; 2]; 2],
    reflected: [[f64; 3]; 2],
}

fn branches(attack: &RestrictedAttack, params: &ProtocolParams) -> Branches {
    let d = attack.d_e();
    let sent = [attack.forward(1.0, 0.0), attack.forward(params.alpha, params.beta)];
    let mut b = Branches { p_k: [[0.0; 2]; 2], measured: [[[0.0; 3]; 2]; 2], reflected: [[0.0; 3]; 2] };
    for x in 0..2 {
        b.reflected[x] = povm_distribution(&attack.reverse(&sent[x]), params, d);
        for k in 0..2 {
            let block = sent[x].block(k * d, d);
            let pk = block.norm_sqr();
            b.p_k[x][k] = pk;
            if pk > 1e-14 {
                let resent = tensor(&StateVector::basis(2, k), &block.normalized().unwrap());
                b.measured[x][k] = povm_distribution(&attack.reverse(&resent), params, d);
            }
        }
    }
    b
}

fn categorical(rng: &mut ChaCha8Rng, p: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

#[derive(Default)]
struct Counts {
    measured: [[u64; 2]; 2],
    outcome: [[[u64; 3]; 2]; 2],
    reflected: [u64; 2],
    reflected_outcome: [[u64; 3]; 2],
}

fn sample(b: &Branches, q: f64, iterations: usize, seed: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Counts::default();
    for _ in 0..iterations {
        let x = usize::from(rng.random_bool(0.5));
        if rng.random_bool(q) {
            let k = categorical(&mut rng, &b.p_k[x]);
            c.measured[x][k] += 1;
            c.outcome[x][k][categorical(&mut rng, &b.measured[x][k])] += 1;
        } else {
            c.reflected[x] += 1;
            c.reflected_outcome[x][categorical(&mut rng, &b.reflected[x])] += 1;
        }
    }
    c
}

/// `|estimate − exact| ≤ 3σ` for a binomial proportion, with a `1/n` floor
/// for proportions at the boundary.
fn within_3_sigma(name: &str, hits: u64, n: u64, exact: f64) {
    if n == 0 {
        return;
    }
    let est = hits as f64 / n as f64;
    let sigma = (exact * (1.0 - exact) / n as f64).sqrt().max(1.0 / n as f64);
    assert!((est - exact).abs() <= 3.0 * sigma, "{name}: sampled {est} vs exact {exact} (σ = {sigma:e}, n = {n})");
}

#[test]
fn sampled_statistics_match_exact_values() {
    let attack = random_attack(4, 31);
    let params = ProtocolParams::with_q(0.35, ProtocolParams::max_p(0.35), 0.5).unwrap();
    let exact = simulate_statistics(&attack, &params);
    let c = sample(&branches(&attack, &params), params.q, 1_000_000, 7);

    let n0 = c.measured[0][0] + c.measured[0][1];
    let na = c.measured[1][0] + c.measured[1][1];
    within_3_sigma("p_ab_0_0", c.measured[0][0], n0, exact.p_ab_0_0);
    within_3_sigma("p_ab_a_1", c.measured[1][1], na, exact.p_ab_a_1);

    let conditional = [
        ("p_aa_0_0_0", c.outcome[0][0][0], c.measured[0][0], exact.p_aa_0_0_0),
        ("p_aa_0_1_0", c.outcome[0][1][0], c.measured[0][1], exact.p_aa_0_1_0),
        ("p_aa_a_0_0", c.outcome[1][0][0], c.measured[1][0], exact.p_aa_a_0_0),
        ("p_aa_a_1_0", c.outcome[1][1][0], c.measured[1][1], exact.p_aa_a_1_0),
        ("p_aa_a_0_a", c.outcome[1][0][1], c.measured[1][0], exact.p_aa_a_0_a),
        ("p_aa_a_1_a", c.outcome[1][1][1], c.measured[1][1], exact.p_aa_a_1_a),
        ("p_aa_a_r_0", c.reflected_outcome[1][0], c.reflected[1], exact.p_aa_a_r_0),
        ("p_aa_a_r_a", c.reflected_outcome[1][1], c.reflected[1], exact.p_aa_a_r_a),
    ];
    for (name, hits, n, value) in conditional {
        within_3_sigma(name, hits, n, value);
    }
}
