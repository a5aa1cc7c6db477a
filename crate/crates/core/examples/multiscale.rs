//! Multiscale (block-diagonal) form of the 512-point Laplacian and the wavelet
//! call tally of the conjugated encoding.

use slacq::block_encoding::{assemble, PrepKind};
use slacq::qswt::{block_coupling_report, diagonal_block, max_coupling, multiscale, MultiscalePlan, QSWT_LABEL};
use slacq::slac::{truncated_laplacian, LatticeConfig, Order};

fn main() -> slacq::Result<()> {
    let plan = MultiscalePlan::new(9, 8)?;
    let ms = plan.conjugate(&truncated_laplacian(LatticeConfig::new(9)?).to_dense()?)?;
    println!("block dims {:?}", plan.dims);
    println!("max cross-scale coupling {:.2e}", max_coupling(&block_coupling_report(&ms, &plan.dims)?));
    for (i, d) in plan.dims.iter().enumerate() {
        let b = diagonal_block(&ms, &plan.dims, i);
        let trace: f64 = b.diagonal().iter().map(|z| z.re).sum();
        println!("  block {i}: dim {d:>3}, mean diagonal {:.5}", trace / *d as f64);
    }
    for n in 3..=7 {
        let (_, spec) = multiscale(&assemble(Order::Second, n, PrepKind::Analytic)?, n - 1)?;
        println!("n={n}: wavelet calls {}", spec.tally().calls(QSWT_LABEL));
    }
    Ok(())
}
