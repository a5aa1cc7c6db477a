use slacq::linalg::loglog_slope;
use slacq::qsim::{Circuit, Statevector};
use slacq::slac::{truncated, LatticeConfig, Order};
use slacq::state_prep::{
    accept_count, build_prep, prep_layout, prep_stage_ops, simulate_prep, success_probability, PrepConfig, PrepStage,
};
use std::f64::consts::PI;

fn theta() -> f64 {
    (24.0 / (PI * PI)).sqrt().atan()
}

/// Success-branch weight of `(μ, j, d)` from a direct count over the
/// reference register.
fn oracle_weight(n: u32, n_ref: u32, order: Order, mu: u32, j: u64) -> f64 {
    let m_ref = 1u64 << n_ref;
    let b = (n - 1) as i32;
    let accepted = (0..m_ref)
        .filter(|&m| match order {
            Order::Second => (1u64 << (2 * mu)) * m_ref > m * j * j,
            Order::First => (1u64 << mu) * m_ref > m * j,
        })
        .count() as f64;
    let (lead, box_p) = match order {
        Order::Second => (theta().sin().powi(2), 2f64.powi(-(mu as i32)) / (2.0 * (1.0 - 2f64.powi(-b)))),
        Order::First => (1.0, 1.0 / b as f64),
    };
    lead * box_p / (1u64 << mu) as f64 * 0.5 * accepted / m_ref as f64
}

#[test]
fn success_branch_matches_reference_enumeration() {
    for order in [Order::Second, Order::First] {
        for n in 3..=7u32 {
            let cfg = PrepConfig::new(n, n, order).unwrap();
            let out = simulate_prep(&cfg).unwrap();
            let mut total = 0.0;
            for mu in 0..n - 1 {
                for j in (1u64 << mu)..(2u64 << mu) {
                    let want = oracle_weight(n, n, order, mu, j);
                    for d in 0..2u64 {
                        let got = out.weights.get(&(1 << mu, j, d)).copied().unwrap_or(0.0);
                        assert!((got - want).abs() < 1e-12, "{order:?} n={n} μ={mu} j={j} d={d}: {got} vs {want}");
                        total += want;
                    }
                }
            }
            if order == Order::Second {
                let p0 = out.weights.get(&(0, 0, 0)).copied().unwrap_or(0.0);
                assert!((p0 - PI * PI / (PI * PI + 24.0)).abs() < 1e-12);
                total += p0;
            }
            assert!((out.probability - total).abs() < 1e-12, "{order:?} n={n}");
            assert!((success_probability(&cfg) - total).abs() < 1e-12, "{order:?} n={n}");
        }
    }
}

#[test]
fn boxes_partition_the_nonzero_offsets() {
    for order in [Order::Second, Order::First] {
        let cfg = PrepConfig::new(5, 6, order).unwrap();
        let out = simulate_prep(&cfg).unwrap();
        for &(mu, j, _) in out.weights.keys() {
            if j == 0 {
                assert_eq!(mu, 0);
                continue;
            }
            assert_eq!(mu.count_ones(), 1, "μ register must be one-hot");
            let box_idx = mu.trailing_zeros() as u64;
            assert!((1 << box_idx) <= j && j < (2 << box_idx), "j={j} in box {box_idx}");
        }
        let covered: std::collections::BTreeSet<u64> = out.weights.keys().map(|k| k.1).filter(|&j| j > 0).collect();
        assert_eq!(covered, (1..16).collect());
    }
}

#[test]
fn unary_to_one_hot_preserves_the_state() {
    for order in [Order::Second, Order::First] {
        for n in 3..=6u32 {
            let cfg = PrepConfig::new(n, 3, order).unwrap();
            let layout = prep_layout(&cfg).unwrap();
            let mut circ = Circuit::new(layout.clone());
            for stage in [PrepStage::Initial, PrepStage::Thermometer, PrepStage::Spread] {
                circ.extend(prep_stage_ops(&cfg, &layout, stage).unwrap()).unwrap();
            }
            let mut before = Statevector::new(layout.clone()).unwrap();
            before.run(&circ).unwrap();
            let mut after = before.clone();
            for op in prep_stage_ops(&cfg, &layout, PrepStage::OneHot).unwrap() {
                after.apply(&op).unwrap();
            }
            let mu_q = layout.qubits("mu").unwrap();
            for (i, z) in before.amplitudes().iter().enumerate() {
                if z.norm() == 0.0 {
                    continue;
                }
                let unary = layout.decode(i, "mu").unwrap();
                assert_eq!(unary & (unary + 1), 0, "thermometer pattern {unary:b} is not a prefix");
                let nontrivial = order == Order::First || layout.decode(i, "a").unwrap() == 1;
                let one_hot = if nontrivial { 1u64 << unary.count_ones() } else { 0 };
                let mut j = i;
                for (k, &q) in mu_q.iter().enumerate() {
                    j &= !(1 << q);
                    j |= ((one_hot >> k & 1) as usize) << q;
                }
                assert!((after.amplitudes()[j] - z).norm() < 1e-14, "{order:?} n={n}");
            }
            assert!((after.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn acceptance_count_examples() {
    assert_eq!(accept_count(0, 1, 16, Order::Second), 16);
    assert_eq!(accept_count(1, 3, 16, Order::Second), 8);
    assert_eq!(accept_count(1, 2, 16, Order::Second), 16);
    assert_eq!(accept_count(2, 7, 64, Order::Second), 21);
    assert_eq!(accept_count(1, 3, 16, Order::First), 11);
    for mu in 0..4u32 {
        for j in (1u64 << mu)..(2u64 << mu) {
            for order in [Order::Second, Order::First] {
                let m_ref = 32u64;
                let direct = (0..m_ref)
                    .filter(|&m| match order {
                        Order::Second => (1u64 << (2 * mu)) * m_ref > m * j * j,
                        Order::First => (1u64 << mu) * m_ref > m * j,
                    })
                    .count() as u64;
                assert_eq!(accept_count(mu, j, m_ref, order), direct);
            }
        }
    }
}

#[test]
fn amplitude_ratios_approach_the_coefficients() {
    let out = simulate_prep(&PrepConfig::new(4, 14, Order::Second).unwrap()).unwrap();
    let r = out.amplitude(2, 1) / out.amplitude(1, 1);
    assert!((r - 0.5).abs() < 1e-3, "ratio {r}");
    let p0 = out.amplitude(0, 0).powi(2);
    assert!((p0 - PI * PI / (PI * PI + 24.0)).abs() < 1e-12);

    let out = simulate_prep(&PrepConfig::new(4, 14, Order::First).unwrap()).unwrap();
    let r = out.amplitude(4, 0).powi(2) / out.amplitude(1, 0).powi(2);
    assert!((r - 0.25).abs() < 1e-3, "ratio {r}");
    assert!((out.amplitude(3, 1) - out.amplitude(3, 0)).abs() < 1e-14);
}

fn unit_sqrt(p: &[f64]) -> Vec<f64> {
    let s: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    let nrm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.into_iter().map(|x| x / nrm).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn first_order_profile_converges_like_one_over_m() {
    let target = unit_sqrt(&truncated(Order::First, LatticeConfig::new(4).unwrap()).coeffs.iter().map(|z| z.norm()).collect::<Vec<_>>());
    let refs: Vec<u32> = (6..=12).collect();
    let ms: Vec<f64> = refs.iter().map(|&r| 2f64.powi(r as i32)).collect();
    let errs: Vec<f64> = refs
        .iter()
        .map(|&r| {
            let out = simulate_prep(&PrepConfig::new(4, r, Order::First).unwrap()).unwrap();
            distance(&unit_sqrt(&out.coefficient_profile()), &target)
        })
        .collect();
    let slope = loglog_slope(&ms, &errs);
    assert!((slope + 1.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
}

#[test]
fn second_order_profile_error_within_inverse_sqrt_m_envelope() {
    let n = 4u32;
    let b = (n - 1) as i32;
    let size = 1usize << n;
    let mut limit = vec![0.0; size];
    limit[0] = theta().cos().powi(2);
    for j in 1..size / 2 {
        let p = theta().sin().powi(2) / (4.0 * (1.0 - 2f64.powi(-b)) * (j * j) as f64);
        limit[j] += p;
        limit[size - j] += p;
    }
    let limit = unit_sqrt(&limit);
    let refs: Vec<u32> = (4..=12).collect();
    let errs: Vec<f64> = refs
        .iter()
        .map(|&r| {
            let out = simulate_prep(&PrepConfig::new(n, r, Order::Second).unwrap()).unwrap();
            distance(&unit_sqrt(&out.coefficient_profile()), &limit)
        })
        .collect();
    let c = errs[..3].iter().zip(&refs).map(|(e, &r)| e * 2f64.powf(r as f64 / 2.0)).fold(0.0, f64::max);
    for (e, &r) in errs.iter().zip(&refs) {
        assert!(*e <= c / 2f64.powf(r as f64 / 2.0) * (1.0 + 1e-12), "M=2^{r}: {e} vs c={c}");
    }
    assert!(errs.last().unwrap() < &errs[0]);
}

#[test]
fn circuit_is_unitary_on_the_prep_layout() {
    let cfg = PrepConfig::new(3, 2, Order::Second).unwrap();
    let circ = build_prep(&cfg).unwrap();
    let m = slacq::qsim::circuit_matrix(&circ).unwrap();
    assert!(slacq::linalg::unitarity_error(&m) < 1e-12);
}

#[test]
fn configuration_limits() {
    assert!(PrepConfig::new(2, 4, Order::Second).is_err());
    assert!(PrepConfig::new(4, 1, Order::Second).is_err());
    assert!(PrepConfig::new(4, 25, Order::First).is_err());
}
