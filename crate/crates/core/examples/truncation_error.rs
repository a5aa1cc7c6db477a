//! Operator-norm error of the truncated SLAC operators against their exact
//! periodic counterparts; the error halves with each doubling of N.

use slacq::slac::{exact, truncated, truncation_error, LatticeConfig, Order, ProjectionSpec};

fn main() -> slacq::Result<()> {
    for order in [Order::Second, Order::First] {
        println!("order {}", order.as_int());
        let mut prev = None;
        for n in 4..=9 {
            let cfg = LatticeConfig::new(n)?;
            let proj = (order == Order::First).then(|| ProjectionSpec::default_for(cfg));
            let e = truncation_error(&exact(order, cfg), &truncated(order, cfg), proj)?;
            let ratio = prev.map(|p: f64| format!("{:.3}", p / e)).unwrap_or_default();
            println!("  N={:>4}  error={e:.6e}  ratio={ratio}", cfg.size());
            prev = Some(e);
        }
    }
    Ok(())
}
