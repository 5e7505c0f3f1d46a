use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use timeflow_core::circuits::{
    closed_form, entanglement_entropy, forward_oracle, nonmax_loss, run_gate_circuit, timeflow_eval,
    timeflow_trace_with, transmission_bounds, weyl_basis, GateCircuit, TeleportCircuit,
};
use timeflow_core::linalg::{ComplexMatrix, PureState};
use timeflow_core::random::{haar_unitary, random_state};
use timeflow_core::timeflow::{time_reverse_gate, BellState, Encoding, EntangledState};
use timeflow_core::Result;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn as_gate_circuit(c: &TeleportCircuit) -> GateCircuit {
    let d = c.d();
    let mut g = GateCircuit::new(vec![d, d, d]).unwrap();
    g.gate(0, c.u().clone())
        .unwrap()
        .gate(1, c.v().clone())
        .unwrap()
        .gate(2, c.w().clone())
        .unwrap()
        .measure_in(vec![0, 1], weyl_basis(c.omega()))
        .unwrap();
    g
}

#[test]
fn gate_simulator_agrees_with_oracle() {
    let mut r = rng(11);
    for d in 2..5 {
        for _ in 0..10 {
            let c = TeleportCircuit::random(d, &mut r);
            let psi = random_state(d, &mut r);
            let oracle = forward_oracle(&c, &psi).unwrap();
            let sim = run_gate_circuit(&as_gate_circuit(&c), &psi.kron(c.phi().state())).unwrap();
            assert_eq!(oracle.len(), sim.len());
            for (k, rep) in &oracle {
                assert!(rep.raw.max_abs_diff(&sim[&vec![*k]].raw) < 1e-12);
            }
        }
    }
}

#[test]
fn gate_simulator_agrees_with_oracle_for_bell_pairs() {
    let mut r = rng(12);
    for phi in BellState::ALL {
        for omega in BellState::ALL {
            let c = TeleportCircuit::new(
                haar_unitary(2, &mut r),
                haar_unitary(2, &mut r),
                haar_unitary(2, &mut r),
                phi.state(),
                omega.state(),
            )
            .unwrap();
            let psi = random_state(2, &mut r);
            let tf = timeflow_eval(&c, &psi, &Encoding::spin_half()).unwrap();
            let sim = run_gate_circuit(&as_gate_circuit(&c), &psi.kron(c.phi().state())).unwrap();
            assert!(tf.raw.max_abs_diff(&sim[&vec![0]].raw) < 1e-12);
        }
    }
}

#[test]
fn skipping_the_transpose_breaks_agreement() {
    let mut r = rng(13);
    let faulty = |u: &ComplexMatrix, e: &Encoding| -> Result<ComplexMatrix> {
        Ok(&(e.m_t() * u) * &e.m_t().dagger())
    };
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let c = TeleportCircuit::random(2, &mut r);
        let psi = random_state(2, &mut r);
        let e = Encoding::spin_half();
        let good = timeflow_trace_with(&c, &psi, &e, time_reverse_gate).unwrap();
        let bad = timeflow_trace_with(&c, &psi, &e, faulty).unwrap();
        let oracle = &forward_oracle(&c, &psi).unwrap()[&0];
        assert!(good[4].vector.max_abs_diff(&oracle.raw) < 1e-12);
        worst = worst.max(bad[4].vector.normalized().unwrap().phase_distance(&oracle.state).unwrap());
    }
    assert!(worst > 1e-3);
}

#[test]
fn non_maximal_pair_still_matches_closed_form() {
    let mut r = rng(14);
    let phi = EntangledState::partially_entangled(PI / 6.0);
    let omega = BellState::PhiPlus.state();
    let mut probabilities = Vec::new();
    for _ in 0..10 {
        let c = TeleportCircuit::with_any_phi(
            haar_unitary(2, &mut r),
            haar_unitary(2, &mut r),
            haar_unitary(2, &mut r),
            phi.clone(),
            omega.clone(),
        )
        .unwrap();
        let psi = random_state(2, &mut r);
        let oracle = forward_oracle(&c, &psi).unwrap();
        let expected = closed_form(&c, &psi).unwrap();
        assert!(oracle[&0].raw.max_abs_diff(&expected) < 1e-12);
        probabilities.push(oracle[&0].probability);
    }
    let spread = probabilities.iter().cloned().fold(f64::MIN, f64::max)
        - probabilities.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-3, "probability should depend on the input");
}

#[test]
fn basis_average_transmission_is_one_over_d_for_every_pair() {
    // Σ_k ‖Q e_k‖² = ‖Q‖_F² = 1, so the average is 1/d regardless of
    // entanglement; only the spread across inputs distinguishes pairs.
    let mut r = rng(15);
    for d in 2..5 {
        for maximal in [true, false] {
            let pi = if maximal {
                EntangledState::maximally_entangled(d).apply_local(0, &haar_unitary(d, &mut r)).unwrap()
            } else {
                EntangledState::new(random_state(d * d, &mut r)).unwrap()
            };
            let ts: Vec<f64> = (0..d)
                .map(|k| nonmax_loss(&pi, &PureState::basis(d, k).unwrap()).unwrap().transmitted)
                .collect();
            let mean = ts.iter().sum::<f64>() / d as f64;
            assert!((mean - 1.0 / d as f64).abs() < 1e-12);
            let (lo, hi) = transmission_bounds(&pi);
            if maximal {
                assert!((lo - 1.0 / d as f64).abs() < 1e-12 && (hi - 1.0 / d as f64).abs() < 1e-12);
            } else {
                assert!(lo < 1.0 / d as f64 && hi > 1.0 / d as f64);
            }
        }
    }
}

#[test]
fn worst_case_transmission_grows_with_entanglement() {
    let thetas: Vec<f64> = (1..=12).map(|k| k as f64 * PI / 48.0).collect();
    let pairs: Vec<(f64, f64)> = thetas
        .iter()
        .map(|&t| {
            let pi = EntangledState::partially_entangled(t);
            (entanglement_entropy(&pi), transmission_bounds(&pi).0)
        })
        .collect();
    for w in pairs.windows(2) {
        assert!(w[1].0 > w[0].0);
        assert!(w[1].1 > w[0].1);
    }
    let (entropy, lo) = pairs[pairs.len() - 1];
    assert!((entropy - 1.0).abs() < 1e-12);
    assert!((lo - 0.5).abs() < 1e-12);
}
