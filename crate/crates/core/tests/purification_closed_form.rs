//! Two-pair recurrence protocols on Bell-diagonal inputs compared with their
//! closed forms, plus simulator invariants.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ionsurgery_core::purification::{
    simulate, simulate_detailed, Constraint, Instruction, PurificationCircuit, Relation, Side,
};
use ionsurgery_core::quantum::gates::same_up_to_phase;
use ionsurgery_core::quantum::{
    bell_weights, stephenson_pair, twirl, Basis, BellDiagonalState, Clifford, DensityMatrix,
    NoiseModel, C64,
};

/// Weights indexed by `2 * phase + flip`: `[phi+, psi+, phi-, psi-]`.
fn random_bell(rng: &mut impl Rng) -> [f64; 4] {
    let mut w: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>() + 1e-3);
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

fn density(w: [f64; 4]) -> DensityMatrix {
    let rest = 1.0 - w[0];
    let b = if rest > 0.0 {
        BellDiagonalState::new(w[0], w[1] / rest, w[2] / rest, w[3] / rest).unwrap()
    } else {
        BellDiagonalState::werner(1.0).unwrap()
    };
    b.to_density()
}

fn bilateral_cnot_then_z(prefix: Vec<Instruction>) -> PurificationCircuit {
    let mut ops = prefix;
    for side in Side::BOTH {
        ops.push(Instruction::Cnot {
            side,
            control: 0,
            target: 1,
        });
    }
    for (side, label) in [(Side::A, "c1"), (Side::B, "c3")] {
        ops.push(Instruction::Measure {
            pair: 1,
            side,
            basis: Basis::Z,
            label: label.into(),
        });
    }
    PurificationCircuit {
        n_pairs: 2,
        ops,
        accept: vec![Constraint {
            labels: ["c1".into(), "c3".into()],
            relation: Relation::Coincident,
        }],
    }
}

fn rx_quarter() -> Clifford {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rx = [
        [C64::new(h, 0.0), C64::new(0.0, -h)],
        [C64::new(0.0, -h), C64::new(h, 0.0)],
    ];
    Clifford::all()
        .find(|c| same_up_to_phase(&c.matrix(), &rx, 1e-12))
        .expect("Rx(pi/2) is Clifford")
}

/// Bilateral CNOT keeps flips when `x1 == x2` and XORs phases onto pair 0.
fn recurrence(w1: [f64; 4], w2: [f64; 4]) -> ([f64; 4], f64) {
    let mut out = [0.0; 4];
    for x in 0..2 {
        for z in 0..2 {
            for z2 in 0..2 {
                out[2 * z + x] += w1[2 * (z ^ z2) + x] * w2[2 * z2 + x];
            }
        }
    }
    let norm: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= norm);
    (out, norm)
}

/// `Rx(pi/2) ⊗ Rx(-pi/2)` exchanges `phi-` and `psi-`.
fn rotate(w: [f64; 4]) -> [f64; 4] {
    [w[0], w[1], w[3], w[2]]
}

#[test]
fn bbpssw_step_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let circuit = bilateral_cnot_then_z(vec![]);
    for _ in 0..100 {
        let (w1, w2) = (random_bell(&mut rng), random_bell(&mut rng));
        let inputs = vec![density(w1), density(w2)];
        let o = simulate(&circuit, &inputs, &NoiseModel::noiseless()).unwrap();
        let (want, norm) = recurrence(w1, w2);
        assert!((o.success_probability - norm).abs() < 1e-9);
        assert!((o.output_fidelity - want[0]).abs() < 1e-9);
        let got = bell_weights(&o.output_state).unwrap();
        for i in 0..4 {
            assert!((got[i] - want[i]).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }
}

#[test]
fn bbpssw_identical_inputs() {
    // (a^2 + c^2) / ((a + c)^2 + (b + d)^2)
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let circuit = bilateral_cnot_then_z(vec![]);
    for _ in 0..100 {
        let [a, b, c, d] = random_bell(&mut rng);
        let o = simulate(&circuit, &density([a, b, c, d]), &NoiseModel::noiseless()).unwrap();
        let n = (a + c).powi(2) + (b + d).powi(2);
        assert!((o.success_probability - n).abs() < 1e-9);
        assert!((o.output_fidelity - (a * a + c * c) / n).abs() < 1e-9);
    }
}

#[test]
fn dejmps_step_matches_closed_form() {
    let rx = rx_quarter();
    let mut prefix = Vec::new();
    for pair in 0..2 {
        prefix.push(Instruction::Clifford {
            pair,
            side: Side::A,
            index: rx,
        });
        prefix.push(Instruction::Clifford {
            pair,
            side: Side::B,
            index: rx.conjugate(),
        });
    }
    let circuit = bilateral_cnot_then_z(prefix);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let (w1, w2) = (random_bell(&mut rng), random_bell(&mut rng));
        let inputs = vec![density(w1), density(w2)];
        let o = simulate(&circuit, &inputs, &NoiseModel::noiseless()).unwrap();
        let (want, norm) = recurrence(rotate(w1), rotate(w2));
        assert!((o.success_probability - norm).abs() < 1e-9);
        let got = bell_weights(&o.output_state).unwrap();
        for i in 0..4 {
            assert!((got[i] - want[i]).abs() < 1e-9, "{got:?} vs {want:?}");
        }
        // identical-input form: (A^2 + B^2) / ((A + B)^2 + (C + D)^2) with A = phi+, B = psi-
        let [a, c, d, b] = w1;
        let same = simulate(&circuit, &density(w1), &NoiseModel::noiseless()).unwrap();
        let n = (a + b).powi(2) + (c + d).powi(2);
        assert!((same.output_fidelity - (a * a + b * b) / n).abs() < 1e-9);
    }
}

#[test]
fn branch_probabilities_sum_to_one() {
    let noise = NoiseModel::trapped_ion();
    let fixture = PurificationCircuit::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../circuits/ga_3to1.json"
    ))
    .unwrap();
    let circuits = [
        bilateral_cnot_then_z(vec![]),
        fixture,
        PurificationCircuit::identity(2),
    ];
    for c in &circuits {
        for input in [
            stephenson_pair(true),
            stephenson_pair(false),
            density([0.7, 0.1, 0.1, 0.1]),
        ] {
            let r = simulate_detailed(c, &input, &noise).unwrap();
            let total: f64 = r.branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-9);
            let accepted: f64 = r
                .branches
                .iter()
                .filter(|b| b.accepted)
                .map(|b| b.probability)
                .sum();
            assert!((accepted - r.outcome.success_probability).abs() < 1e-9);
        }
    }
}

fn arb_bell() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.001f64..1.0).prop_map(|mut w| {
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twirl_keeps_fidelity(w in arb_bell(), seed in 0u64..1000) {
        // Bell-diagonal mixed with a random local-unitary component
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = density(w);
        let c = Clifford::new(rng.gen_range(0..24)).unwrap();
        s.apply_single(&c.matrix(), 1).unwrap();
        let f = bell_weights(&s).unwrap()[0];
        let t = twirl(&s).unwrap();
        prop_assert!((t.f - f).abs() < 1e-12);
        prop_assert!((bell_weights(&t.to_density()).unwrap()[0] - f).abs() < 1e-12);
    }

    #[test]
    fn output_is_a_normalized_state(w in arb_bell(), p2 in 0.0f64..0.05) {
        let noise = NoiseModel::new(p2 / 10.0, p2, p2 / 5.0).unwrap();
        let o = simulate(&bilateral_cnot_then_z(vec![]), &density(w), &noise).unwrap();
        prop_assert!(o.success_probability > 0.0 && o.success_probability <= 1.0 + 1e-12);
        prop_assert!((o.output_state.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(o.output_state.hermiticity_error() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&o.output_fidelity));
    }

    #[test]
    fn simulation_is_deterministic(w in arb_bell()) {
        let c = bilateral_cnot_then_z(vec![]);
        let a = simulate(&c, &density(w), &NoiseModel::trapped_ion()).unwrap();
        let b = simulate(&c, &density(w), &NoiseModel::trapped_ion()).unwrap();
        prop_assert_eq!(a, b);
    }
}
