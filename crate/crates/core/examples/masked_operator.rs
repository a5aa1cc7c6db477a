//! Row-masked (non-circulant) SLAC operator: circuit block against the dense
//! reference.

use slacq::block_encoding::{masked_operator, MaskSpec};
use slacq::linalg::{fit_scale, matrix_fidelity};
use slacq::slac::Order;

fn main() -> slacq::Result<()> {
    let masks = [("full", MaskSpec::full(4)?), ("sawtooth", MaskSpec::sawtooth(4)?), ("empty", MaskSpec::empty(4)?)];
    for (name, mask) in masks {
        let (dense, spec) = masked_operator(Order::Second, &mask)?;
        let block = spec.encoded()?;
        if dense.iter().all(|z| z.norm() == 0.0) {
            println!("{name:>9}: dense operator vanishes, block norm {:.2e}", block.norm());
            continue;
        }
        println!(
            "{name:>9}: fidelity {:.12}, scale of α·phase·B against dense {:.12}",
            matrix_fidelity(&block, &dense),
            fit_scale(&block, &dense)
        );
    }
    Ok(())
}
