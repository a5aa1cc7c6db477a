use slacq::linalg::unitarity_error;
use slacq::qsim::{Circuit, RegisterLayout};
use slacq::qswt::{
    block_coupling_report, diagonal_block, max_coupling, multiscale_ops, scale_dims, MultiscalePlan, QSWT_LABEL,
};
use slacq::slac::{exact, to_dense, truncated, LatticeConfig, Order};
use slacq::{CMat, C64};
use std::f64::consts::PI;

fn sorted_hermitian_eigs(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut e: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

#[test]
fn multiscale_transform_is_unitary() {
    for n in 2..=8u32 {
        for r in 1..n {
            let plan = MultiscalePlan::new(n, r).unwrap();
            assert!(unitarity_error(&plan.w) < 1e-12, "n={n} r={r}");
            assert_eq!(plan.dims.iter().sum::<usize>(), 1 << n);
        }
    }
}

#[test]
fn conjugation_preserves_the_spectrum() {
    for n in 3..=7u32 {
        let cfg = LatticeConfig::new(n).unwrap();
        let lap = to_dense(&truncated(Order::Second, cfg).coeffs).unwrap();
        let d1 = to_dense(&exact(Order::First, cfg).coeffs).unwrap() * C64::new(0.0, 1.0);
        for r in 1..n {
            let plan = MultiscalePlan::new(n, r).unwrap();
            for m in [&lap, &d1] {
                let before = sorted_hermitian_eigs(m);
                let after = sorted_hermitian_eigs(&plan.conjugate(m).unwrap());
                for (a, b) in before.iter().zip(&after) {
                    assert!((a - b).abs() < 1e-9, "n={n} r={r}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn exact_laplacian_separates_into_scale_blocks() {
    for n in 3..=7u32 {
        let lap = to_dense(&exact(Order::Second, LatticeConfig::new(n).unwrap()).coeffs).unwrap();
        for r in 1..n {
            let plan = MultiscalePlan::new(n, r).unwrap();
            let rep = block_coupling_report(&plan.conjugate(&lap).unwrap(), &plan.dims).unwrap();
            assert!(max_coupling(&rep) < 1e-9, "n={n} r={r}");
        }
    }
}

/// `−(2πk/N)²` over the momenta kept by the IR block after `r` steps:
/// `|k| < N/2^{r+1}` together with one edge mode.
fn ir_oracle(size: usize, r: u32) -> Vec<f64> {
    let edge = (size >> (r + 1)) as i64;
    let mut v: Vec<f64> = (-edge + 1..=edge).map(|k| -(2.0 * PI * k as f64 / size as f64).powi(2)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn ir_block_follows_quadratic_dispersion() {
    let n = 8u32;
    let size = 1usize << n;
    let lap = to_dense(&exact(Order::Second, LatticeConfig::new(n).unwrap()).coeffs).unwrap();
    let mut devs = Vec::new();
    for r in 1..=3u32 {
        let plan = MultiscalePlan::new(n, r).unwrap();
        let ir = diagonal_block(&plan.conjugate(&lap).unwrap(), &plan.dims, 0);
        assert_eq!(ir.nrows(), size >> r);
        let scale = 4f64.powi(r as i32);
        let got: Vec<f64> = sorted_hermitian_eigs(&ir).iter().map(|e| e * scale).collect();
        let want: Vec<f64> = ir_oracle(size, r).iter().map(|e| e * scale).collect();
        let peak = want.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let dev = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        devs.push(dev);
    }
    for w in devs.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{devs:?}");
    }
    assert!(devs.iter().all(|&d| d < 1e-9), "{devs:?}");
}

#[test]
fn circuit_tally_counts_one_step_per_scale() {
    for n in 3..=9u32 {
        for r in 1..n {
            let layout = RegisterLayout::new(&[("x", n as usize)]).unwrap();
            let mut c = Circuit::new(layout.clone());
            c.extend(multiscale_ops(&layout.qubits("x").unwrap(), r).unwrap()).unwrap();
            assert_eq!(c.tally().calls(QSWT_LABEL), r as u64);
        }
    }
}

#[test]
fn scale_dims_and_limits() {
    assert_eq!(scale_dims(8, 3), vec![32, 32, 64, 128]);
    assert!(MultiscalePlan::new(4, 4).is_err());
    assert!(MultiscalePlan::new(4, 0).is_err());
    let layout = RegisterLayout::new(&[("x", 3)]).unwrap();
    assert!(multiscale_ops(&layout.qubits("x").unwrap(), 3).is_err());
}
