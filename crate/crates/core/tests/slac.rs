use proptest::prelude::*;
use slacq::linalg::loglog_slope;
use slacq::slac::{
    circulant_spectrum, exact, exact_first_order, exact_laplacian, signed_momentum, to_dense, truncated,
    truncation_error, LatticeConfig, Order, ProjectionSpec,
};
use slacq::C64;
use std::f64::consts::PI;

fn cfg(n: u32) -> LatticeConfig {
    LatticeConfig::new(n).unwrap()
}

/// Eigenvalue of a circulant with first column `c` on Fourier mode `k`,
/// evaluated as a plain sum.
fn dft_eigenvalue(c: &[C64], k: usize) -> C64 {
    let n = c.len();
    c.iter()
        .enumerate()
        .map(|(j, z)| z * C64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
        .sum()
}

fn hermiticity(c: &[C64], sign: f64) -> f64 {
    let m = to_dense(c).unwrap();
    (&m - m.adjoint() * C64::new(sign, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn laplacians_are_hermitian_and_first_order_anti_hermitian() {
    for n in 3..=8 {
        for v in [exact(Order::Second, cfg(n)), truncated(Order::Second, cfg(n))] {
            assert!(hermiticity(&v.coeffs, 1.0) < 1e-12, "n={n}");
        }
        for v in [exact(Order::First, cfg(n)), truncated(Order::First, cfg(n))] {
            assert!(hermiticity(&v.coeffs, -1.0) < 1e-12, "n={n}");
        }
    }
}

#[test]
fn exact_laplacian_has_minus_q_squared_symbol() {
    for n in 3..=9 {
        let op = exact_laplacian(cfg(n));
        let size = op.size();
        for k in 0..size {
            let q = 2.0 * PI * signed_momentum(k, size) as f64 / size as f64;
            let lam = dft_eigenvalue(&op.coeffs, k);
            if k == size / 2 {
                continue;
            }
            assert!((lam.re + q * q).abs() < 1e-9 && lam.im.abs() < 1e-9, "n={n} k={k}: {lam}");
        }
    }
}

#[test]
fn exact_first_order_has_i_q_symbol_away_from_the_edge() {
    for n in 3..=8 {
        let op = exact_first_order(cfg(n));
        let size = op.size();
        for k in 0..size {
            if k == size / 2 {
                continue;
            }
            let q = 2.0 * PI * signed_momentum(k, size) as f64 / size as f64;
            let lam = dft_eigenvalue(&op.coeffs, k);
            assert!(lam.re.abs() < 1e-9, "n={n} k={k}: {lam}");
            assert!((lam.im.abs() - q.abs()).abs() < 1e-9, "n={n} k={k}: {lam}");
        }
    }
}

#[test]
fn truncated_first_order_spectrum_is_imaginary() {
    for n in 3..=8 {
        for z in truncated(Order::First, cfg(n)).spectrum() {
            assert!(z.re.abs() < 1e-10);
        }
    }
}

#[test]
fn truncation_error_decreases_like_one_over_n() {
    let ns: Vec<u32> = (5..=12).collect();
    let sizes: Vec<f64> = ns.iter().map(|&n| (1u64 << n) as f64).collect();
    let mut errs = Vec::new();
    for &n in &ns {
        let c = cfg(n);
        let e = truncation_error(&exact(Order::Second, c), &truncated(Order::Second, c), None).unwrap();
        errs.push(e);
    }
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    let slope = loglog_slope(&sizes, &errs);
    assert!((slope + 1.0).abs() <= 0.15, "slope {slope}");

    let mut errs1 = Vec::new();
    for &n in &ns {
        let c = cfg(n);
        let p = ProjectionSpec::default_for(c);
        errs1.push(truncation_error(&exact(Order::First, c), &truncated(Order::First, c), Some(p)).unwrap());
    }
    let slope1 = loglog_slope(&sizes, &errs1);
    assert!((slope1 + 1.0).abs() <= 0.15, "first-order slope {slope1}");
}

#[test]
fn truncation_error_matches_dense_operator_norm() {
    for n in 3..=6 {
        let c = cfg(n);
        let (e, t) = (exact(Order::Second, c), truncated(Order::Second, c));
        let d = to_dense(&e.coeffs).unwrap() - to_dense(&t.coeffs).unwrap();
        let sv = d.singular_values().max();
        let got = truncation_error(&e, &t, None).unwrap();
        assert!((sv - got).abs() < 1e-10, "n={n}: {sv} vs {got}");
    }
}

#[test]
fn first_order_error_requires_projection() {
    let c = cfg(5);
    assert!(truncation_error(&exact(Order::First, c), &truncated(Order::First, c), None).is_err());
    assert!(ProjectionSpec::new(0, c).is_err());
    assert!(ProjectionSpec::new(17, c).is_err());
}

#[test]
fn invalid_lattices_are_rejected() {
    assert!(LatticeConfig::new(1).is_err());
    assert!(LatticeConfig::from_size(12).is_err());
    assert_eq!(LatticeConfig::from_size(64).unwrap().qubits(), 6);
    assert!(Order::from_int(3).is_err());
}

fn coeff_strategy() -> impl Strategy<Value = Vec<C64>> {
    (2u32..=6).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), 1usize << n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dense_entries_follow_circulant_rule(c in coeff_strategy()) {
        let m = to_dense(&c).unwrap();
        let n = c.len();
        for r in 0..n {
            for col in 0..n {
                prop_assert_eq!(m[(r, col)], c[(r + n - col) % n]);
            }
        }
    }

    #[test]
    fn spectrum_matches_explicit_dft(c in coeff_strategy()) {
        let fast = circulant_spectrum(&c);
        for (k, z) in fast.iter().enumerate() {
            prop_assert!((z - dft_eigenvalue(&c, k)).norm() < 1e-10);
        }
    }

    #[test]
    fn fourier_modes_are_eigenvectors(c in coeff_strategy(), k in 0usize..64) {
        let n = c.len();
        let k = k % n;
        let m = to_dense(&c).unwrap();
        let v = slacq::CVec::from_iterator(n, (0..n).map(|x| C64::from_polar(1.0, 2.0 * PI * (x * k) as f64 / n as f64)));
        let lam = circulant_spectrum(&c)[k];
        let resid = (&m * &v - &v * lam).norm();
        prop_assert!(resid < 1e-9, "resid {}", resid);
    }

    #[test]
    fn spectrum_round_trips_to_coefficients(c in coeff_strategy()) {
        let n = c.len();
        let spec = circulant_spectrum(&c);
        for j in 0..n {
            let back: C64 = spec
                .iter()
                .enumerate()
                .map(|(k, z)| z * C64::from_polar(1.0, 2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum::<C64>() / n as f64;
            prop_assert!((back - c[j]).norm() < 1e-10);
        }
    }
}
