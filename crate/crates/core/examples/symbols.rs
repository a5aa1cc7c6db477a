//! Fourier symbols of the first- and second-order derivatives at a few momenta.

use slacq::slac::{symbol_table, LatticeConfig};

fn main() -> slacq::Result<()> {
    let table = symbol_table(LatticeConfig::new(6)?, 16)?;
    print!("{:>8}", "q");
    for s in &table {
        print!("{:>15}", s.label);
    }
    println!();
    for i in 0..table[0].q_grid.len() {
        print!("{:>8.4}", table[0].q_grid[i]);
        for s in &table {
            print!("{:>15.6}", s.values[i]);
        }
        println!();
    }
    Ok(())
}
