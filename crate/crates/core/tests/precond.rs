use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slacq::linalg::kron;
use slacq::precond::{
    benchmark_operator, condition_number, condition_sweep, dyadic_band_check, emulated_solve, fourier_mode,
    precond_block_encoding, preconditioned_dense, project_rhs, swap_test_projection, u_pm_matrix, Benchmark,
    PdeOperator, PdeProblem, Preconditioner, NULL_TOL,
};
use slacq::slac::{exact_laplacian, truncated_laplacian, LatticeConfig, Variant};
use slacq::{CMat, CVec, C64};

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> CVec {
    CVec::from_iterator(len, (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

fn max_dev(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn exact_laplacian_preconditioned_condition_number_is_four() {
    let mut values = Vec::new();
    for n in 4..=9u32 {
        let a = exact_laplacian(LatticeConfig::new(n).unwrap()).to_dense().unwrap();
        let ap = preconditioned_dense(&a, &Preconditioner::new(n, 1.0).unwrap()).unwrap();
        let k = condition_number(&ap, true, NULL_TOL).unwrap();
        assert!((k - 4.0).abs() < 1e-6, "n={n}: κ_p={k}");
        values.push(k);
    }
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(hi / lo <= 1.0 + 1e-6);
}

#[test]
fn phase_diagonals_average_to_the_preconditioner() {
    for n in 2..=7u32 {
        for e in [0.5, 1.0, 2.0] {
            let pre = Preconditioner::new(n, e).unwrap();
            let up = u_pm_matrix(&pre, true).unwrap();
            let um = u_pm_matrix(&pre, false).unwrap();
            for m in [&up, &um] {
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        if r == c {
                            assert!((m[(r, c)].norm() - 1.0).abs() < 1e-12);
                        } else {
                            assert!(m[(r, c)].norm() < 1e-14);
                        }
                    }
                }
            }
            let avg = (&up + &um) * C64::new(0.5, 0.0);
            assert!(max_dev(&avg, &pre.dense()) < 1e-12, "n={n} e={e}");
            let enc = precond_block_encoding(&pre).unwrap().encoded().unwrap();
            assert!(max_dev(&enc, &pre.dense()) < 1e-12, "n={n} e={e}");
        }
    }
}

#[test]
fn weights_follow_dyadic_levels() {
    let pre = Preconditioner::new(4, 1.0).unwrap();
    let want = [1.0, 1.0, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125];
    assert_eq!(pre.weights(), &want);
    assert!(Preconditioner::new(4, -1.0).is_err());
}

#[test]
fn swap_test_matches_dense_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a9);
    for n in 3..=6u32 {
        let size = 1usize << n;
        let uniform = CVec::from_element(size, C64::new(1.0, 0.0));
        for trial in 0..50 {
            let null = if trial % 5 == 4 { random_vec(&mut rng, size) } else { uniform.clone() };
            let b = random_vec(&mut rng, size);
            let out = swap_test_projection(b.as_slice(), null.as_slice()).unwrap();
            let bu = &b / C64::new(b.norm(), 0.0);
            let nu = &null / C64::new(null.norm(), 0.0);
            let dense = &bu - &nu * nu.dotc(&bu);
            for (x, y) in out.residual.iter().zip(dense.iter()) {
                assert!((x - y * 0.5).norm() < 1e-12, "n={n} trial={trial}");
            }
            assert!((out.probability - dense.norm_squared() / 4.0).abs() < 1e-12);
            let (proj, zero) = project_rhs(&b, &null).unwrap();
            assert!(!zero);
            let state = CVec::from_vec(out.state.unwrap());
            let want = &proj / C64::new(proj.norm(), 0.0);
            assert!((state - want).norm() < 1e-10);
        }
    }
}

#[test]
fn swap_test_annihilates_the_null_vector() {
    let size = 16;
    let null = vec![C64::new(1.0, 0.0); size];
    let out = swap_test_projection(&null, &null).unwrap();
    assert!(out.probability < 1e-24 && out.state.is_none());
}

#[test]
fn benchmark_solves_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe7c);
    for which in Benchmark::ALL {
        for n in 4..=6u32 {
            let size = 1usize << n;
            let rhs = random_vec(&mut rng, size);
            let operator = PdeOperator::Benchmark { which, eps: 0.5 };
            let problem = PdeProblem {
                dimension: 1,
                n,
                operator,
                rhs: rhs.clone(),
                project_nullspace: false,
                exponent: 1.0,
                null_tol: NULL_TOL,
            };
            let rep = emulated_solve(&problem).unwrap();
            let (a, _) = benchmark_operator(which, n, 0.5).unwrap();
            let res = (&a * &rep.solution - &rhs).norm() / rhs.norm();
            assert!(res <= 1e-8, "{} n={n}: {res}", which.name());
            assert!(rep.branch_mismatch < 1e-8);
            let projected = PdeProblem { project_nullspace: true, ..problem };
            assert!(emulated_solve(&projected).is_err());
        }
    }
}

#[test]
fn laplacian_solves_against_projected_rhs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a9);
    for variant in [Variant::Exact, Variant::Truncated] {
        for n in 3..=6u32 {
            let size = 1usize << n;
            let cfg = LatticeConfig::new(n).unwrap();
            let a = match variant {
                Variant::Exact => exact_laplacian(cfg),
                Variant::Truncated => truncated_laplacian(cfg),
            }
            .to_dense()
            .unwrap();
            let rhs = random_vec(&mut rng, size);
            let mean = rhs.iter().sum::<C64>() / size as f64;
            let bp = rhs.map(|z| z - mean);
            let rep = emulated_solve(&PdeProblem {
                dimension: 1,
                n,
                operator: PdeOperator::Laplacian(variant),
                rhs,
                project_nullspace: true,
                exponent: 1.0,
                null_tol: NULL_TOL,
            })
            .unwrap();
            let res = (&a * &rep.solution - &bp).norm() / bp.norm();
            assert!(res <= 1e-8, "{variant:?} n={n}: {res}");
            assert!(rep.solution.iter().sum::<C64>().norm() < 1e-9);
            assert!(rep.null_overlap <= 2.0 / size as f64 + 1e-12, "n={n}: {}", rep.null_overlap);
        }
    }
}

#[test]
fn two_dimensional_solve_matches_kronecker_sum() {
    let n = 4u32;
    let size = 1usize << n;
    let a1 = exact_laplacian(LatticeConfig::new(n).unwrap()).to_dense().unwrap();
    let id = CMat::identity(size, size);
    let a2 = kron(&a1, &id) + kron(&id, &a1);
    let mode = fourier_mode(size, 3);
    let other = fourier_mode(size, -2);
    let rhs = CVec::from_iterator(size * size, (0..size * size).map(|i| mode[i / size] * other[i % size]));
    let rep = emulated_solve(&PdeProblem {
        dimension: 2,
        n,
        operator: PdeOperator::Laplacian(Variant::Exact),
        rhs: rhs.clone(),
        project_nullspace: true,
        exponent: 1.0,
        null_tol: NULL_TOL,
    })
    .unwrap();
    let res = (&a2 * &rep.solution - &rhs).norm() / rhs.norm();
    assert!(res <= 1e-8, "{res}");
    assert!((rep.fidelity.unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn null_rhs_is_flagged() {
    let rep = emulated_solve(&PdeProblem {
        dimension: 1,
        n: 4,
        operator: PdeOperator::Laplacian(Variant::Truncated),
        rhs: CVec::from_element(16, C64::new(0.25, 0.0)),
        project_nullspace: true,
        exponent: 1.0,
        null_tol: NULL_TOL,
    })
    .unwrap();
    assert!(rep.zero_rhs);
    assert_eq!(rep.solution.norm(), 0.0);
}

#[test]
fn dyadic_bands_lie_in_quarter_to_one() {
    for n in 3..=10u32 {
        let bands = dyadic_band_check(n).unwrap();
        assert_eq!(bands.len(), n as usize);
        for b in &bands {
            assert!(b.min >= 0.25 - 1e-15 && b.max <= 1.0 + 1e-15, "{b:?}");
        }
        let last = bands.last().unwrap();
        assert!((last.min - 0.25).abs() < 1e-15 && (last.max - 1.0).abs() < 1e-15);
    }
}

#[test]
fn benchmark_conditioning_is_tamed() {
    for which in Benchmark::ALL {
        let rows = condition_sweep(which, &[5, 7], 1.0, 0.5, NULL_TOL).unwrap();
        let growth = rows[1].kappa / rows[0].kappa;
        let growth_p = rows[1].kappa_p / rows[0].kappa_p;
        assert!(growth > 8.0, "{}: κ growth {growth}", which.name());
        assert!(growth_p < 1.25, "{}: κ_p growth {growth_p}", which.name());
    }
    assert!(benchmark_operator(Benchmark::L4, 4, 1.0).is_err());
    assert_eq!(Benchmark::parse("l3").unwrap(), Benchmark::L3);
    assert!(Benchmark::parse("L5").is_err());
}

#[test]
fn ellipticity_bounds_hold() {
    for which in Benchmark::ALL {
        let (_, e) = benchmark_operator(which, 6, 0.3).unwrap();
        assert!(e.minimum >= e.bound - 1e-12, "{}", which.name());
        assert!(e.bound > 0.0);
    }
}
