//! Linear combinations of encodings: `D + Δ` and a complex mix with a point
//! defect.

use slacq::block_encoding::{
    assemble, diagonal_encoding, general_combination, pair_sum, point_defect, LcuCombination, LcuTerm, PrepKind,
};
use slacq::linalg::max_abs;
use slacq::slac::{truncated_first_order, truncated_laplacian, LatticeConfig, Order};
use slacq::{CMat, CVec, C64};

fn main() -> slacq::Result<()> {
    let n = 4;
    let cfg = LatticeConfig::new(n)?;
    let d1 = truncated_first_order(cfg).to_dense()?;
    let d2 = truncated_laplacian(cfg).to_dense()?;
    let e1 = assemble(Order::First, n, PrepKind::Analytic)?;
    let e2 = assemble(Order::Second, n, PrepKind::Analytic)?;

    let pair = pair_sum(&e1, &e2, 1.0, 0.5)?;
    let err = max_abs(&(pair.encoded()? - (&d1 + &d2 * C64::new(0.5, 0.0))));
    println!("pair sum: alpha={:.4}, max deviation {err:.2e}", pair.alpha);

    let defect = point_defect(n, 3, 4.0)?;
    let terms = vec![
        LcuTerm { encoding: e2, coefficient: C64::new(-1.0, 0.0) },
        LcuTerm { encoding: diagonal_encoding(&defect)?, coefficient: C64::new(0.0, 1.0) },
    ];
    let g = general_combination(&LcuCombination::tight(terms)?)?;
    let reference = -&d2 + CMat::from_diagonal(&CVec::from_vec(defect)) * C64::new(0.0, 1.0);
    println!("general: alpha={:.4}, max deviation {:.2e}", g.alpha, max_abs(&(g.encoded()? - reference)));
    Ok(())
}
