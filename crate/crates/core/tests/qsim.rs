use proptest::prelude::*;
use slacq::qsim::{
    anti, ctl, decompose, tally_comparator, tally_const_adder, Circuit, GateCounts, Op, PredicateFn, RegisterLayout,
    Statevector,
};
use slacq::C64;
use std::sync::Arc;

const WEIGHT: u64 = 5;

fn random_state(layout: RegisterLayout, raw: &[(f64, f64)]) -> Statevector {
    let mut amps: Vec<C64> = raw.iter().map(|&(a, b)| C64::new(a, b)).collect();
    let nrm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
    amps.iter_mut().for_each(|z| *z /= nrm);
    Statevector::from_amplitudes(layout, amps).unwrap()
}

fn op_from_code(code: u8, q: usize, r: usize, angle: f64, w: usize) -> Op {
    let other = if r == q { (q + 1) % w } else { r };
    match code % 8 {
        0 => Op::h(q),
        1 => Op::x(q),
        2 => Op::ry(q, angle),
        3 => Op::phase(q, angle),
        4 => Op::cx(other, q),
        5 => Op::add_const((0..w).collect(), (angle.abs() * 100.0) as u64),
        6 => Op::Qft { qubits: (0..w).collect(), inverse: angle < 0.0, controls: vec![] },
        _ => Op::ry(q, angle).when(vec![anti(other)]),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32),
        ops in prop::collection::vec((0u8..8, 0usize..5, 0usize..5, -3.0f64..3.0), 1..12),
    ) {
        let layout = RegisterLayout::new(&[("r", 5)]).unwrap();
        let mut sv = random_state(layout, &raw);
        for (code, q, r, a) in ops {
            sv.apply(&op_from_code(code, q, r, a, 5)).unwrap();
            prop_assert!((sv.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circuit_then_adjoint_is_identity(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        ops in prop::collection::vec((0u8..8, 0usize..4, 0usize..4, -3.0f64..3.0), 1..10),
    ) {
        let layout = RegisterLayout::new(&[("r", 4)]).unwrap();
        let mut circ = Circuit::new(layout.clone());
        circ.extend(ops.into_iter().map(|(c, q, r, a)| op_from_code(c, q, r, a, 4))).unwrap();
        let start = random_state(layout, &raw);
        let mut sv = start.clone();
        sv.run(&circ).unwrap();
        sv.run(&circ.adjoint()).unwrap();
        for (a, b) in sv.amplitudes().iter().zip(start.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn add_const_inverse_exhaustive() {
    for w in 1..=6usize {
        let layout = RegisterLayout::new(&[("r", w)]).unwrap();
        let qubits: Vec<usize> = (0..w).collect();
        let size = 1u64 << w;
        for c in 0..size {
            for x in 0..size {
                let mut sv = Statevector::basis(layout.clone(), x as usize).unwrap();
                sv.apply(&Op::add_const(qubits.clone(), c)).unwrap();
                let y = ((x + c) % size) as usize;
                assert_eq!(sv.amplitudes()[y], C64::new(1.0, 0.0), "w={w} c={c} x={x}");
                sv.apply(&Op::add_const(qubits.clone(), (size - c) % size)).unwrap();
                assert_eq!(sv.amplitudes()[x as usize], C64::new(1.0, 0.0));
            }
        }
    }
}

#[test]
fn predicate_is_an_involution_and_flips_only_when_true() {
    let layout = RegisterLayout::new(&[("a", 3), ("b", 3), ("f", 1)]).unwrap();
    let a = layout.qubits("a").unwrap();
    let b = layout.qubits("b").unwrap();
    let f = layout.qubit("f", 0).unwrap();
    let op = Op::Predicate {
        inputs: vec![a, b],
        flag: f,
        func: PredicateFn(Arc::new(|v: &[u64]| v[0] * WEIGHT > v[1] * v[1])),
        label: "cmp".into(),
        cost: GateCounts::default(),
        controls: vec![],
    };
    for x in 0..8u64 {
        for y in 0..8u64 {
            for flag in 0..2u64 {
                let idx = layout.encode(&[("a", x), ("b", y), ("f", flag)]).unwrap();
                let mut sv = Statevector::basis(layout.clone(), idx).unwrap();
                sv.apply(&op).unwrap();
                let want = flag ^ u64::from(x * WEIGHT > y * y);
                let out = layout.encode(&[("a", x), ("b", y), ("f", want)]).unwrap();
                assert_eq!(sv.amplitudes()[out], C64::new(1.0, 0.0));
                sv.apply(&op).unwrap();
                assert_eq!(sv.amplitudes()[idx], C64::new(1.0, 0.0));
            }
        }
    }
}

fn run_basis(circ: &Circuit, idx: usize) -> usize {
    let mut sv = Statevector::basis(circ.layout.clone(), idx).unwrap();
    sv.run(circ).unwrap();
    let hits: Vec<usize> =
        sv.amplitudes().iter().enumerate().filter(|(_, z)| z.norm() > 1e-12).map(|(i, _)| i).collect();
    assert_eq!(hits.len(), 1, "not a permutation");
    assert!((sv.amplitudes()[hits[0]].re - 1.0).abs() < 1e-12);
    hits[0]
}

#[test]
fn decomposed_adder_matches_semantics_and_tally() {
    for w in 1..=4usize {
        for c in 0..(1u64 << w) {
            for controlled in [false, true] {
                let circ = decompose::const_adder(w, c, controlled).unwrap();
                let l = &circ.layout;
                let ctrl_values: &[u64] = if controlled { &[0, 1] } else { &[0] };
                for &cv in ctrl_values {
                    for b in 0..(1u64 << w) {
                        let mut vals = vec![("b", b)];
                        if controlled {
                            vals.push(("ctrl", cv));
                        }
                        let out = run_basis(&circ, l.encode(&vals).unwrap());
                        let add = if controlled && cv == 0 { 0 } else { c };
                        assert_eq!(l.decode(out, "b").unwrap(), (b + add) % (1 << w), "w={w} c={c}");
                        assert_eq!(l.decode(out, "a").unwrap(), 0);
                        assert_eq!(l.decode(out, "c0").unwrap(), 0);
                    }
                }
                let t = circ.tally();
                assert_eq!(t.gates, tally_const_adder(w, c, usize::from(controlled)), "w={w} c={c}");
            }
        }
    }
}

#[test]
fn decomposed_comparator_matches_semantics_and_tally() {
    for w in 1..=4usize {
        let circ = decompose::comparator(w).unwrap();
        let l = &circ.layout;
        for a in 0..(1u64 << w) {
            for b in 0..(1u64 << w) {
                let out = run_basis(&circ, l.encode(&[("a", a), ("b", b)]).unwrap());
                assert_eq!(l.decode(out, "flag").unwrap(), u64::from(a < b), "w={w} a={a} b={b}");
                assert_eq!(l.decode(out, "a").unwrap(), a);
                assert_eq!(l.decode(out, "b").unwrap(), b);
                assert_eq!(l.decode(out, "c0").unwrap(), 0);
            }
        }
        assert_eq!(circ.tally().gates, tally_comparator(w), "w={w}");
    }
}

#[test]
fn controlled_gates_fire_on_the_right_value() {
    let layout = RegisterLayout::new(&[("c", 1), ("t", 1)]).unwrap();
    for (control, fires_on) in [(ctl(0), 1usize), (anti(0), 0usize)] {
        for cv in 0..2usize {
            let mut sv = Statevector::basis(layout.clone(), cv).unwrap();
            sv.apply(&Op::x(1).when(vec![control])).unwrap();
            let t = if cv == fires_on { 1 } else { 0 };
            assert_eq!(sv.amplitudes()[cv | t << 1], C64::new(1.0, 0.0));
        }
    }
}

#[test]
fn oversized_layouts_are_rejected() {
    assert!(RegisterLayout::new(&[("a", 27)]).is_err());
    assert!(Statevector::new(RegisterLayout::with_cap(&[("a", 40)], 128).unwrap()).is_err());
}
