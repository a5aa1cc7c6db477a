//! Toffoli and total gate counts of the gate-level encodings.

use slacq::block_encoding::gate_level_tally;
use slacq::slac::Order;
use slacq::state_prep::inequality_cost;

fn main() -> slacq::Result<()> {
    for order in [Order::Second, Order::First] {
        println!("order {}", order.as_int());
        for n in 3..=10 {
            let c = inequality_cost(n, n, order);
            let t = gate_level_tally(order, n, n)?;
            println!(
                "  n={n:>2}: inequality Toffoli {:>4} (squarer {}, multiplier {}, comparator {}), total gates {:>6}",
                c.toffoli(),
                c.squarer,
                c.multiplier,
                c.comparator,
                t.total()
            );
        }
    }
    Ok(())
}
