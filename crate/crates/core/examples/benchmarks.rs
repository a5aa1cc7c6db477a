//! Condition numbers of the four elliptic benchmarks with and without the
//! multiscale preconditioner.

use slacq::precond::{benchmark_operator, condition_sweep, Benchmark, NULL_TOL};

fn main() -> slacq::Result<()> {
    for b in Benchmark::ALL {
        let (_, ell) = benchmark_operator(b, 6, 0.5)?;
        println!("{}: principal coefficient min {:.4} (bound {:.4})", b.name(), ell.minimum, ell.bound);
        for row in condition_sweep(b, &[6, 7, 8], 1.0, 0.5, NULL_TOL)? {
            println!("  N={:>4}: κ={:>12.2}  κ_p={:.4}", row.size, row.kappa, row.kappa_p);
        }
    }
    Ok(())
}
