//! Emulated preconditioned Poisson solves in one and two dimensions.

use slacq::precond::{emulated_solve, fourier_mode, PdeOperator, PdeProblem, NULL_TOL};
use slacq::slac::Variant;
use slacq::{CVec, C64};

fn main() -> slacq::Result<()> {
    let one = emulated_solve(&PdeProblem {
        dimension: 1,
        n: 8,
        operator: PdeOperator::Laplacian(Variant::Truncated),
        rhs: fourier_mode(256, 5),
        project_nullspace: true,
        exponent: 1.0,
        null_tol: NULL_TOL,
    })?;
    println!(
        "1D N=256: residual {:.2e}, fidelity {:.12}, κ={:.1}, κ_p={:.3}, wavelet calls {}",
        one.residual,
        one.fidelity.unwrap_or(f64::NAN),
        one.kappa.unwrap_or(f64::NAN),
        one.kappa_p.unwrap_or(f64::NAN),
        one.qswt_calls
    );
    let rhs = CVec::from_iterator(1024, (0..1024).map(|i| C64::new(((i * 37) % 11) as f64 - 5.0, 0.0)));
    let two = emulated_solve(&PdeProblem {
        dimension: 2,
        n: 5,
        operator: PdeOperator::Laplacian(Variant::Truncated),
        rhs,
        project_nullspace: true,
        exponent: 1.0,
        null_tol: NULL_TOL,
    })?;
    println!("2D 32×32: residual {:.2e}, fidelity {:.12}", two.residual, two.fidelity.unwrap_or(f64::NAN));
    Ok(())
}
