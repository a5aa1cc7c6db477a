//! Diagonal wavelet preconditioner: κ_p of the exact Laplacian stays at 4.

use slacq::precond::{condition_number, dyadic_band_check, precond_block_encoding, preconditioned_dense, Preconditioner, NULL_TOL};
use slacq::linalg::max_abs;
use slacq::slac::{exact_first_order, exact_laplacian, LatticeConfig};

fn main() -> slacq::Result<()> {
    for n in 4..=9 {
        let cfg = LatticeConfig::new(n)?;
        let lap = exact_laplacian(cfg).to_dense()?;
        let der = exact_first_order(cfg).to_dense()?;
        let k = condition_number(&lap, true, NULL_TOL)?;
        let kp = condition_number(&preconditioned_dense(&lap, &Preconditioner::new(n, 1.0)?)?, true, NULL_TOL)?;
        let k1 = condition_number(&preconditioned_dense(&der, &Preconditioner::new(n, 0.5)?)?, true, NULL_TOL)?;
        println!("n={n}: κ={k:>10.2}  κ_p={kp:.9}  first-order κ_p={k1:.6}");
    }
    let pre = Preconditioner::new(5, 1.0)?;
    let be = precond_block_encoding(&pre)?;
    println!("U_P block vs P: {:.2e}", max_abs(&(be.block()? - pre.dense())));
    for b in dyadic_band_check(6)? {
        println!("band {}: [{:.4}, {:.4}]", b.level, b.min, b.max);
    }
    Ok(())
}
