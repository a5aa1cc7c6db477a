//! Gate-level nested-box PREP: success probability and finite-M error.

use slacq::slac::Order;
use slacq::state_prep::{prep_error, simulate_prep, success_probability, PrepConfig};

fn main() -> slacq::Result<()> {
    for order in [Order::Second, Order::First] {
        for n_ref in [6, 8, 10] {
            let cfg = PrepConfig::new(5, n_ref, order)?;
            let out = simulate_prep(&cfg)?;
            println!(
                "order {} n=5 M={:>5}: p_success={:.6} (closed form {:.6}), amplitude error {:.3e}",
                order.as_int(),
                cfg.m_ref(),
                out.probability,
                success_probability(&cfg),
                prep_error(&out)
            );
        }
    }
    Ok(())
}
