//! LCU block-encodings of the SLAC Laplacian and first derivative, checked
//! against the dense circulant matrices.

use slacq::block_encoding::{assemble, encoding_error, PrepKind};
use slacq::slac::{truncated, LatticeConfig, Order};

fn main() -> slacq::Result<()> {
    for order in [Order::Second, Order::First] {
        for n in 3..=5 {
            let spec = assemble(order, n, PrepKind::Analytic)?;
            let target = truncated(order, LatticeConfig::new(n)?).to_dense()?;
            println!(
                "order {} n={n}: alpha={:.6} ancillas={} error={:.2e}",
                order.as_int(),
                spec.alpha,
                spec.ancillas(),
                encoding_error(&spec, &target)?
            );
        }
    }
    let gate = assemble(Order::Second, 4, PrepKind::GateLevel { n_ref: 8 })?;
    let target = truncated(Order::Second, LatticeConfig::new(4)?).to_dense()?;
    println!(
        "gate-level n=4 M=256: error={:.3e} (bound {:.3e})",
        encoding_error(&gate, &target)?,
        gate.epsilon.unwrap_or(f64::NAN)
    );
    Ok(())
}
