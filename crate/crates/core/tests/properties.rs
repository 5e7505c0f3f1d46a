use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use timeflow_core::circuits::{closed_form, forward_oracle, timeflow_eval, TeleportCircuit};
use timeflow_core::linalg::{kron, partial_trace, ComplexMatrix, DensityMatrix, PureState};
use timeflow_core::nmr::{
    apply_rotation, build_hamiltonian, evolve, gradient_crush, pauli_decompose, pseudopure_init, Axis,
    PauliProductState, PauliSymbol, SpinSystem,
};
use timeflow_core::random::{haar_unitary, random_state};
use timeflow_core::timeflow::{
    q_of_state, state_of_q, time_reverse_gate, Encoding, EntangledState,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> ComplexMatrix {
    let v = random_state(rows * cols, r).into_amplitudes();
    ComplexMatrix::new(rows, cols, v).unwrap()
}

fn symbol() -> impl Strategy<Value = PauliSymbol> {
    prop_oneof![
        Just(PauliSymbol::I),
        Just(PauliSymbol::X),
        Just(PauliSymbol::Y),
        Just(PauliSymbol::Z),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(seed: u64, a in 1usize..4, b in 1usize..4, c in 1usize..3) {
        let mut r = rng(seed);
        let (x, y, z) = (random_matrix(a, b, &mut r), random_matrix(b, c, &mut r), random_matrix(c, a, &mut r));
        let left = kron(&kron(&x, &y), &z);
        let right = kron(&x, &kron(&y, &z));
        prop_assert!(left.max_abs_diff(&right) < 1e-15);
    }

    #[test]
    fn dagger_is_an_involution(seed: u64, rows in 1usize..5, cols in 1usize..5) {
        let m = random_matrix(rows, cols, &mut rng(seed));
        prop_assert_eq!(m.dagger().dagger(), m.clone());
        prop_assert_eq!(m.transpose().conjugate(), m.dagger());
    }

    #[test]
    fn partial_trace_preserves_trace(seed: u64, d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..3, keep_mask in 0u8..8) {
        let mut r = rng(seed);
        let dims = [d1, d2, d3];
        let rho = DensityMatrix::from_pure(&random_state(d1 * d2 * d3, &mut r));
        let keep: Vec<usize> = (0..3).filter(|k| keep_mask & (1 << k) != 0).collect();
        let reduced = partial_trace(rho.matrix(), &dims, &keep).unwrap();
        prop_assert!((reduced.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(reduced.trace().im.abs() < 1e-12);
        prop_assert!(reduced.is_hermitian(1e-12));
    }

    #[test]
    fn q_reshaping_is_bijective(seed: u64, d in 2usize..5) {
        let phi = EntangledState::new(random_state(d * d, &mut rng(seed))).unwrap();
        let back = state_of_q(&q_of_state(&phi)).unwrap();
        prop_assert_eq!(back.state(), phi.state());
    }

    #[test]
    fn pauli_label_round_trip(symbols in prop::collection::vec(symbol(), 1..5)) {
        let label = PauliProductState::new(symbols).unwrap();
        let terms = pauli_decompose(&pseudopure_init(&label), 1e-12).unwrap();
        prop_assert_eq!(terms.len(), 1);
        prop_assert_eq!(&terms[0].0, &label);
        prop_assert!((terms[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn time_mirror_identity(seed: u64, d in 2usize..5) {
        // (1 ⊗ U)|Φ_T⟩ = (U^tr ⊗ 1)|Φ_T⟩
        let mut r = rng(seed);
        let e = Encoding::photon_number(d);
        let u = haar_unitary(d, &mut r);
        let canon = e.canonical_state();
        let lhs = canon.apply_local(1, &u).unwrap();
        let rhs = canon.apply_local(0, &time_reverse_gate(&u, &e).unwrap()).unwrap();
        prop_assert!(lhs.state().max_abs_diff(rhs.state()) < 1e-12);
    }

    #[test]
    fn time_mirror_identity_for_spin(seed: u64) {
        let mut r = rng(seed);
        let e = Encoding::spin_half();
        let u = haar_unitary(2, &mut r);
        let canon = e.canonical_state();
        let lhs = canon.apply_local(1, &u).unwrap();
        let rhs = canon.apply_local(0, &time_reverse_gate(&u, &e).unwrap()).unwrap();
        prop_assert!(lhs.state().max_abs_diff(rhs.state()) < 1e-12);
    }

    #[test]
    fn semantics_agree(seed: u64, d in 2usize..5) {
        let mut r = rng(seed);
        let c = TeleportCircuit::random(d, &mut r);
        let psi = random_state(d, &mut r);
        let tf = timeflow_eval(&c, &psi, &Encoding::photon_number(d)).unwrap();
        let fw = forward_oracle(&c, &psi).unwrap();
        prop_assert!(tf.state.phase_distance(&fw[&0].state).unwrap() < 1e-10);
        prop_assert!(tf.raw.max_abs_diff(&closed_form(&c, &psi).unwrap()) < 1e-12);
        let total: f64 = fw.values().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn crusher_is_idempotent_and_trace_preserving(seed: u64, mask in 1u8..8) {
        let mut r = rng(seed);
        let rho = DensityMatrix::from_pure(&random_state(8, &mut r));
        let spins: Vec<usize> = (0..3).filter(|k| mask & (1 << k) != 0).collect();
        let once = gradient_crush(&rho, &spins).unwrap();
        let twice = gradient_crush(&once, &spins).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!((once.trace() - rho.trace()).abs() < 1e-15);
    }

    #[test]
    fn evolution_preserves_spectrum(seed: u64, t in 0.0f64..0.05) {
        let mut r = rng(seed);
        let s = SpinSystem::from_upper_triangle(vec![120.0, -340.0, 55.0], &[12.0, -3.0, 40.0]).unwrap();
        let rho = DensityMatrix::from_pure(&random_state(8, &mut r));
        let mixed = apply_rotation(&rho, &[0, 2], Axis::Y, 0.9).unwrap();
        let out = evolve(&mixed, &build_hamiltonian(&s), t).unwrap();
        prop_assert!(out.matrix().is_hermitian(1e-12));
        let (a, b) = (mixed.eigenvalues().unwrap(), out.eigenvalues().unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn hamiltonian_commutes_with_every_z() {
    let s = SpinSystem::from_upper_triangle(vec![10.0, 20.0, -30.0], &[1.0, 2.0, 3.0]).unwrap();
    let h = build_hamiltonian(&s);
    for k in 0..3 {
        let mut symbols = vec![PauliSymbol::I; 3];
        symbols[k] = PauliSymbol::Z;
        let z = PauliProductState::new(symbols).unwrap().matrix();
        let comm = &(&h * &z) - &(&z * &h);
        assert_eq!(comm.max_abs(), 0.0);
    }
}

#[test]
fn pure_state_rejects_unnormalized_input() {
    let v = vec![num_complex::Complex64::new(1.0, 0.0); 2];
    assert!(PureState::new(v).is_err());
}
