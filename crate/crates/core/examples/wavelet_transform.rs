//! One wavelet step separates low and high momenta of a circulant operator.

use slacq::linalg::unitarity_error;
use slacq::qswt::{block_coupling_report, max_coupling, qswt_cost, qswt_matrix};
use slacq::slac::{exact_laplacian, LatticeConfig};

fn main() -> slacq::Result<()> {
    for n in 2..=8 {
        let s = qswt_matrix(n)?;
        let half = 1usize << (n - 1);
        let a = exact_laplacian(LatticeConfig::new(n)?).to_dense()?;
        let leak = max_coupling(&block_coupling_report(&(&s * a * s.adjoint()), &[half, half])?);
        let cost = qswt_cost(n)?;
        println!(
            "N={:>4}: unitarity {:.1e}, IR/UV leak {:.1e}, gates {}",
            1 << n,
            unitarity_error(&s),
            leak,
            cost.total()
        );
    }
    Ok(())
}
