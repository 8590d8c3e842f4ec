//! Randomised invariants of the circuit model, simulator and builders.

use groverlab::circuit::{Circuit, GateKind, GateOp, UnitaryMatrix};
use groverlab::grover::{build_grover, GroverSpec, Variant};
use groverlab::sim::{exact_distribution, run_ideal, StateVector};
use groverlab::theoretical_success;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_op<R: Rng>(rng: &mut R, width: usize) -> GateOp {
    let mut qubits: Vec<usize> = (0..width).collect();
    qubits.shuffle(rng);
    let max_kind = if width >= 2 { 10 } else { 5 };
    let kind = match rng.gen_range(0..max_kind) {
        0 => GateKind::H,
        1 => GateKind::X,
        2 => GateKind::Y,
        3 => GateKind::Z,
        4 => GateKind::Rz(rng.gen_range(-3.2..3.2)),
        5 => GateKind::Cx,
        6 => GateKind::Cz,
        7 => GateKind::Swap,
        8 => GateKind::Mcx(rng.gen_range(1..width)),
        _ => GateKind::Mcz(rng.gen_range(1..width)),
    };
    qubits.truncate(kind.arity());
    GateOp::new(kind, qubits)
}

fn random_circuit<R: Rng>(rng: &mut R, max_width: usize, max_len: usize) -> Circuit {
    let width = rng.gen_range(1..=max_width);
    let mut c = Circuit::new(width, 0).unwrap();
    for _ in 0..rng.gen_range(0..=max_len) {
        c.push(random_op(rng, width)).unwrap();
    }
    c
}

#[test]
fn kernels_agree_with_dense_unitary_on_ten_thousand_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..10_000 {
        let c = random_circuit(&mut rng, 6, 20);
        let column = c.dense_unitary().unwrap().column(0);
        let state = run_ideal(&c).unwrap();
        for (a, b) in state.amplitudes().iter().zip(&column) {
            assert!((a - b).norm() < 1e-10, "circuit {i}: {c:?}");
        }
    }
}

#[test]
fn norm_is_preserved_after_every_gate() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let c = random_circuit(&mut rng, 8, 40);
        let mut s = StateVector::zero(c.width()).unwrap();
        for op in c.ops() {
            s.apply(op);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn mcz_is_symmetric_under_qubit_permutations() {
    let base = Circuit::new(4, 0)
        .unwrap()
        .append(GateOp::new(GateKind::Mcz(3), [0, 1, 2, 3]))
        .unwrap()
        .dense_unitary()
        .unwrap();
    let mut perm = [0usize, 1, 2, 3];
    // Heap's algorithm over all 24 orderings.
    fn heap(k: usize, perm: &mut [usize; 4], base: &UnitaryMatrix) {
        if k == 1 {
            let u = Circuit::new(4, 0)
                .unwrap()
                .append(GateOp::new(GateKind::Mcz(3), perm.to_vec()))
                .unwrap()
                .dense_unitary()
                .unwrap();
            assert_eq!(u.max_abs_diff(base), 0.0, "{perm:?}");
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, base);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    heap(4, &mut perm, &base);
}

#[test]
fn mcx_flips_target_exactly_when_controls_are_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for width in 2..=6 {
        for k in 1..width {
            let mut qubits: Vec<usize> = (0..width).collect();
            qubits.shuffle(&mut rng);
            qubits.truncate(k + 1);
            let c = Circuit::new(width, 0)
                .unwrap()
                .append(GateOp::new(GateKind::Mcx(k), qubits.clone()))
                .unwrap();
            let u = c.dense_unitary().unwrap();
            let target = qubits[k];
            for b in 0..(1usize << width) {
                let fire = qubits[..k].iter().all(|&q| (b >> q) & 1 == 1);
                let image = if fire { b ^ (1 << target) } else { b };
                assert_eq!(u.get(image, b), Complex64::new(1.0, 0.0), "w={width} k={k} b={b}");
            }
        }
    }
}

#[test]
fn grover_matches_closed_form_for_every_variant() {
    for n in 2..=10 {
        for r in 0..=6 {
            let expect = theoretical_success(1 << n, r);
            for variant in Variant::ALL {
                let goal = (0b1_0110_1101 >> (10 - n)) & ((1 << n) - 1);
                let c = build_grover(&GroverSpec::new(n, goal, r, variant).unwrap()).unwrap();
                let d = exact_distribution(&run_ideal(&c).unwrap(), c.measured()).unwrap();
                assert!((d.probs[goal] - expect).abs() < 1e-10, "n={n} r={r} {variant}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_unitaries_are_unitary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, 5, 12);
        let u = c.dense_unitary().unwrap();
        let id = UnitaryMatrix::identity(u.dim());
        prop_assert!(u.mul(&u.adjoint()).max_abs_diff(&id) < 1e-10);
    }

    #[test]
    fn hadamard_is_an_involution(seed in any::<u64>(), target in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(5, 0).unwrap();
        for _ in 0..15 {
            c.push(random_op(&mut rng, 5)).unwrap();
        }
        let mut s = run_ideal(&c).unwrap();
        let before = s.clone();
        s.apply(&GateOp::h(target));
        s.apply(&GateOp::h(target));
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn marginalisation_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(5, 0).unwrap();
        for _ in 0..20 {
            c.push(random_op(&mut rng, 5)).unwrap();
        }
        let s = run_ideal(&c).unwrap();
        let measured = [3usize, 0, 4];
        let direct = exact_distribution(&s, &measured).unwrap();
        // Full distribution first, then sum out the other qubits.
        let full = exact_distribution(&s, &[0, 1, 2, 3, 4]).unwrap();
        let mut marginal = vec![0.0; 8];
        for (b, p) in full.probs.iter().enumerate() {
            let o = measured.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((b >> q) & 1) << i));
            marginal[o] += p;
        }
        for (a, b) in direct.probs.iter().zip(&marginal) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
