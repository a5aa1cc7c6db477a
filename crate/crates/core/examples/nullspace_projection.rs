//! Swap-test projection of a right-hand side off the zero mode.

use slacq::linalg::fidelity;
use slacq::precond::{project_rhs, swap_test_projection};
use slacq::{CVec, C64};

fn main() -> slacq::Result<()> {
    let size = 16;
    let null = vec![C64::new(1.0, 0.0); size];
    let b: Vec<C64> = (0..size).map(|x| C64::new(1.0 + (x as f64).sin(), 0.3 * x as f64)).collect();
    let out = swap_test_projection(&b, &null)?;
    let (dense, zero) = project_rhs(&CVec::from_vec(b.clone()), &CVec::from_vec(null.clone()))?;
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    println!("flag probability {:.6}, expected ‖b⊥‖²/4 = {:.6}", out.probability, dense.norm_squared() / nb / 4.0);
    println!("fidelity with dense projector {:.12}, zero flag {zero}", fidelity(out.state.as_deref().unwrap_or(&[]), dense.as_slice()));
    let z = swap_test_projection(&null, &null)?;
    println!("b = ψ_null: probability {:.2e}", z.probability);
    Ok(())
}
