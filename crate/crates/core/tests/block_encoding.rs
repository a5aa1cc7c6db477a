use proptest::prelude::*;
use slacq::block_encoding::{
    assemble, diagonal_encoding, general_combination, masked_encoding, normalization_table, pair_sum, point_defect,
    LcuCombination, LcuTerm, MaskSpec, PrepKind,
};
use slacq::slac::{truncated, LatticeConfig, Order};
use slacq::{CMat, C64};
use std::f64::consts::PI;

fn reference(order: Order, n: u32) -> CMat {
    let c = truncated(order, LatticeConfig::new(n).unwrap()).coeffs;
    let size = c.len();
    CMat::from_fn(size, size, |r, col| c[(r + size - col) % size])
}

fn shift(size: usize) -> CMat {
    CMat::from_fn(size, size, |r, c| if r == (c + 1) % size { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn max_dev(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn analytic_encodings_reproduce_the_operators() {
    for order in [Order::Second, Order::First] {
        for n in 3..=6 {
            let be = assemble(order, n, PrepKind::Analytic).unwrap();
            let dev = max_dev(&be.encoded().unwrap(), &reference(order, n));
            assert!(dev < 1e-12, "{order:?} n={n}: {dev}");
        }
    }
    let be = assemble(Order::Second, 4, PrepKind::Analytic).unwrap();
    assert!((be.alpha - (PI * PI + 24.0) / 3.0).abs() < 1e-14);
    assert!((assemble(Order::First, 5, PrepKind::Analytic).unwrap().alpha - 8.0).abs() < 1e-14);
}

#[test]
fn blocks_are_contractions() {
    let mut specs = vec![
        assemble(Order::Second, 4, PrepKind::Analytic).unwrap(),
        assemble(Order::First, 4, PrepKind::Analytic).unwrap(),
        assemble(Order::Second, 4, PrepKind::GateLevel { n_ref: 5 }).unwrap(),
        assemble(Order::First, 4, PrepKind::GateLevel { n_ref: 5 }).unwrap(),
        masked_encoding(Order::First, &MaskSpec::sawtooth(4).unwrap()).unwrap(),
    ];
    specs.push(pair_sum(&specs[0], &specs[1], 0.3, 0.7).unwrap());
    for be in &specs {
        let s = be.block().unwrap().singular_values().max();
        assert!(s <= 1.0 + 1e-12, "{}: σmax {s}", be.label);
    }
}

#[test]
fn unmasked_blocks_commute_with_the_shift() {
    for order in [Order::Second, Order::First] {
        for kind in [PrepKind::Analytic, PrepKind::GateLevel { n_ref: 6 }] {
            let b = assemble(order, 4, kind).unwrap().block().unwrap();
            let p = shift(16);
            assert!(max_dev(&(&b * &p), &(&p * &b)) < 1e-12, "{order:?} {kind:?}");
        }
    }
}

#[test]
fn blocks_have_the_operator_symmetry() {
    for kind in [PrepKind::Analytic, PrepKind::GateLevel { n_ref: 6 }] {
        let b2 = assemble(Order::Second, 4, kind).unwrap().block().unwrap();
        assert!(max_dev(&b2, &b2.adjoint()) < 1e-12, "{kind:?}");
        let b1 = assemble(Order::First, 4, kind).unwrap().block().unwrap();
        assert!(max_dev(&b1, &(-b1.adjoint())) < 1e-12, "{kind:?}");
    }
}

#[test]
fn gate_level_error_within_declared_bound() {
    for order in [Order::Second, Order::First] {
        for n_ref in [4, 6, 8] {
            let be = assemble(order, 4, PrepKind::GateLevel { n_ref }).unwrap();
            let err = (be.encoded().unwrap() - reference(order, 4)).singular_values().max();
            let eps = be.epsilon.unwrap();
            assert!(err <= eps + 1e-10, "{order:?} n_ref={n_ref}: {err} > {eps}");
        }
    }
}

#[test]
fn normalization_table_values() {
    let rows = normalization_table(&[3, 5, 8, 10]).unwrap();
    for r in &rows {
        assert!((r.alpha_second - (PI * PI + 24.0) / 3.0).abs() < 1e-14);
        assert!((r.alpha_first - 2.0 * (r.n as f64 - 1.0)).abs() < 1e-14);
        assert!(r.laplacian_ratio >= 1.0 && r.laplacian_ratio < 2.0, "n={}: {}", r.n, r.laplacian_ratio);
        assert!((r.generic_bound - 2f64.powf(r.n as f64 / 2.0) * PI * PI).abs() < 1e-9);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.laplacian_ratio).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    let limit = (PI * PI + 24.0) / (3.0 * PI * PI);
    assert!((ratios[3] - limit).abs() < 2e-3, "{ratios:?} vs {limit}");
}

#[test]
fn pair_and_general_combinations() {
    let a = assemble(Order::Second, 3, PrepKind::Analytic).unwrap();
    let b = assemble(Order::First, 3, PrepKind::Analytic).unwrap();
    let (ra, rb) = (reference(Order::Second, 3), reference(Order::First, 3));
    let sum = pair_sum(&a, &b, 0.25, 2.0).unwrap();
    let want = &ra * C64::new(0.25, 0.0) + &rb * C64::new(2.0, 0.0);
    assert!(max_dev(&sum.encoded().unwrap(), &want) < 1e-11);
    assert!((sum.alpha - (0.25 * a.alpha + 2.0 * b.alpha)).abs() < 1e-12);

    let y = [C64::new(0.5, -1.0), C64::new(-0.75, 0.25)];
    let terms =
        vec![LcuTerm { encoding: a.clone(), coefficient: y[0] }, LcuTerm { encoding: b.clone(), coefficient: y[1] }];
    let combo = general_combination(&LcuCombination::new(terms.clone(), 2.0).unwrap()).unwrap();
    let want = &ra * y[0] + &rb * y[1];
    assert!(max_dev(&combo.encoded().unwrap(), &want) < 1e-11);
    assert!(LcuCombination::new(terms, 0.5).is_err());
    assert!(pair_sum(&a, &b, -1.0, 1.0).is_err());
}

#[test]
fn defect_encoding_is_diagonal() {
    let v = point_defect(3, 5, -2.5).unwrap();
    let be = diagonal_encoding(&v).unwrap();
    let enc = be.encoded().unwrap();
    for r in 0..8 {
        for c in 0..8 {
            let want = if r == c && r == 5 { C64::new(-2.5, 0.0) } else { C64::new(0.0, 0.0) };
            assert!((enc[(r, c)] - want).norm() < 1e-13);
        }
    }
    assert_eq!(be.ancillas(), 1);
    assert!(point_defect(3, 8, 1.0).is_err());
}

fn masked_oracle(order: Order, cutoffs: &[u64]) -> CMat {
    let size = cutoffs.len();
    let n = size.trailing_zeros();
    let c = truncated(order, LatticeConfig::new(n).unwrap()).coeffs;
    let mut m = CMat::zeros(size, size);
    for row in 0..size {
        for col in 0..size {
            let up = (row + size - col) % size;
            let down = (col + size - row) % size;
            if (1..size / 2).contains(&up) && up as u64 <= cutoffs[row] {
                m[(row, col)] += c[up];
            }
            if (1..size / 2).contains(&down) && down as u64 <= cutoffs[row] {
                m[(row, col)] -= c[down];
            }
        }
    }
    m
}

#[test]
fn full_mask_recovers_antisymmetric_combination() {
    for order in [Order::Second, Order::First] {
        for n in 3..=5 {
            let size = 1usize << n;
            let c = truncated(order, LatticeConfig::new(n).unwrap()).coeffs;
            let p = shift(size);
            let mut want = CMat::zeros(size, size);
            let mut pj = CMat::identity(size, size);
            for j in 1..size / 2 {
                pj = &p * &pj;
                let back = pj.adjoint();
                want += (&pj - &back) * c[j];
            }
            let be = masked_encoding(order, &MaskSpec::full(n).unwrap()).unwrap();
            assert!(max_dev(&be.encoded().unwrap(), &want) < 1e-12, "{order:?} n={n}");
            let empty = masked_encoding(order, &MaskSpec::empty(n).unwrap()).unwrap();
            assert!(empty.encoded().unwrap().iter().all(|z| z.norm() < 1e-13));
        }
    }
}

#[test]
fn invalid_masks_are_rejected() {
    assert!(MaskSpec::new(vec![0, 1, 3, 0]).is_err());
    assert!(MaskSpec::new(vec![0, 1, 2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn masked_encoding_matches_oracle(
        n in 3u32..=4,
        raw in prop::collection::vec(0u64..=8, 16),
        second in any::<bool>(),
    ) {
        let size = 1usize << n;
        let cutoffs: Vec<u64> = raw[..size].iter().map(|c| c % (size as u64 / 2 + 1)).collect();
        let order = if second { Order::Second } else { Order::First };
        let be = masked_encoding(order, &MaskSpec::new(cutoffs.clone()).unwrap()).unwrap();
        let dev = max_dev(&be.encoded().unwrap(), &masked_oracle(order, &cutoffs));
        prop_assert!(dev < 1e-12, "dev {}", dev);
        prop_assert!(be.block().unwrap().singular_values().max() <= 1.0 + 1e-12);
    }
}
