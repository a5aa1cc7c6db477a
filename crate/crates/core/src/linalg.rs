//! Small dense linear-algebra helpers on top of nalgebra.

use crate::{CMat, CVec, Error, Result, C64};
use std::f64::consts::PI;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Unitary DFT matrix with kernel `e^{+2πi·rc/N}/√N`.
pub fn dft_matrix(n: usize) -> CMat {
    let s = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |r, c| cis(2.0 * PI * ((r * c) % n) as f64 / n as f64) * s)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Matrix with `blocks` placed along the diagonal.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        let d = b.nrows();
        out.view_mut((o, o), (d, d)).copy_from(b);
        o += d;
    }
    out
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Singular values sorted in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

pub fn unitarity_error(u: &CMat) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMat::identity(n, n)))
}

/// |⟨u,v⟩|² / (‖u‖²‖v‖²); zero when either vector vanishes.
pub fn fidelity(u: &[C64], v: &[C64]) -> f64 {
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    ip.norm_sqr() / (uu * vv)
}

/// Fidelity of the column-major vectorizations of two matrices.
pub fn matrix_fidelity(a: &CMat, b: &CMat) -> f64 {
    fidelity(a.as_slice(), b.as_slice())
}

/// Least-squares positive scale `s` minimising ‖s·a − b‖_F.
pub fn fit_scale(a: &CMat, b: &CMat) -> f64 {
    let num: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if den == 0.0 {
        0.0
    } else {
        num.re / den
    }
}

/// Solve `a x = b` restricted to the complement of the known kernel vectors.
///
/// For a normal operator whose kernel is spanned by `kernel` the deflated
/// matrix `a + Σ v v†` is invertible, and for `b ⊥ kernel` its solution is the
/// minimum-norm (pseudo-inverse) solution.
pub fn pinv_solve(a: &CMat, b: &CVec, kernel: &[CVec]) -> Result<CVec> {
    let mut m = a.clone();
    for v in kernel {
        let nv = v.norm();
        if nv == 0.0 {
            return Err(Error::Singular("zero kernel vector".into()));
        }
        let u = v / C64::new(nv, 0.0);
        m += &u * u.adjoint();
    }
    let lu = m.lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singular("deflated operator is not invertible".into()))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares polynomial coefficients (lowest degree first).
pub fn poly_fit(x: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    let v = nalgebra::DMatrix::<f64>::from_fn(x.len(), degree + 1, |r, c| x[r].powi(c as i32));
    let rhs = nalgebra::DVector::<f64>::from_column_slice(y);
    let sol = v.clone().svd(true, true).solve(&rhs, 1e-14).expect("svd solve");
    sol.iter().copied().collect()
}
