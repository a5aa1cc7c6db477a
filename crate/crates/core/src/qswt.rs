//! Quantum Shannon wavelet transform and its multiscale recursion.
//!
//! One transform step on `m` qubits (`N = 2^m`) is
//! `S = QFT_{N/2}^† ⊗ … · U_block · U_split · U_mix · U_shift · QFT`:
//! shift the momenta so `k = 0` sits at index `N/2`, mix the two edge modes
//! `±N/4`, rotate by `N/4` so the low half of the momenta is contiguous,
//! then transform each half back with a half-size inverse QFT. The result
//! separates low (IR) and high (UV) momenta exactly.

use crate::block_encoding::BlockEncodingSpec;
use crate::linalg::{block_diag, dagger, dft_matrix, max_abs, ONE};
use crate::qsim::{anti, circuit_matrix, Circuit, GateCounts, Mat2, Op, RegisterLayout};
use crate::{CMat, Error, Result, C64};
use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::{Arc, Mutex, OnceLock};

/// Label of one transform block in tallies.
pub const QSWT_LABEL: &str = "qswt";

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `[[1, 1], [i, −i]]/√2` on the edge pair `(N/4, 3N/4)`.
pub fn mix_matrix() -> Mat2 {
    let s = FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(0.0, s), c(0.0, -s)]]
}

/// Operations of one transform step on `qubits` (little-endian, `m ≥ 2`).
pub fn qswt_ops(qubits: &[usize]) -> Result<Vec<Op>> {
    let m = qubits.len();
    if m < 2 {
        return Err(Error::Config(format!("the wavelet step needs at least 2 qubits, got {m}")));
    }
    let size = 1u64 << m;
    let low = &qubits[..m - 1];
    let mut phases = vec![ONE; size as usize];
    phases[(3 * size / 4) as usize] = -ONE;
    Ok(vec![
        Op::Qft { qubits: qubits.to_vec(), inverse: false, controls: vec![] },
        Op::add_const(qubits.to_vec(), size / 2),
        Op::TwoLevel { qubits: qubits.to_vec(), a: size / 4, b: 3 * size / 4, matrix: mix_matrix(), controls: vec![] },
        Op::add_const(qubits.to_vec(), 3 * size / 4),
        Op::Diagonal { qubits: qubits.to_vec(), phases: Arc::new(phases), controls: vec![] },
        Op::add_const(low.to_vec(), (size / 2 - size / 4) % (size / 2)),
        Op::Qft { qubits: low.to_vec(), inverse: true, controls: vec![] },
    ])
}

/// One transform step as a tallied block.
pub fn qswt_block(qubits: &[usize]) -> Result<Op> {
    Ok(Op::Block { label: QSWT_LABEL.into(), ops: qswt_ops(qubits)?, cost: None })
}

/// Dense components of one transform step.
#[derive(Debug, Clone)]
pub struct QswtPlan {
    pub n: u32,
    pub qft: CMat,
    pub shift: CMat,
    pub mix: CMat,
    pub split: CMat,
    pub block: CMat,
    pub half_inverse_qft: CMat,
}

fn add_perm(size: usize, k: usize) -> CMat {
    let mut p = CMat::zeros(size, size);
    for x in 0..size {
        p[((x + k) % size, x)] = ONE;
    }
    p
}

impl QswtPlan {
    pub fn new(n: u32) -> Result<Self> {
        if !(2..=12).contains(&n) {
            return Err(Error::Config(format!("wavelet plan needs 2 ≤ n ≤ 12, got {n}")));
        }
        let size = 1usize << n;
        let half = size / 2;
        let mut mix = CMat::identity(size, size);
        let (a, b) = (size / 4, 3 * size / 4);
        let m = mix_matrix();
        mix[(a, a)] = m[0][0];
        mix[(a, b)] = m[0][1];
        mix[(b, a)] = m[1][0];
        mix[(b, b)] = m[1][1];
        let rot = add_perm(half, (half - size / 4) % half);
        let mut block = block_diag(&[&rot, &rot]);
        for r in 0..size {
            block[(r, b)] = -block[(r, b)];
        }
        let fh = dagger(&dft_matrix(half));
        Ok(Self {
            n,
            qft: dft_matrix(size),
            shift: add_perm(size, half),
            mix,
            split: add_perm(size, 3 * size / 4),
            block,
            half_inverse_qft: block_diag(&[&fh, &fh]),
        })
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    /// The composed transform.
    pub fn matrix(&self) -> CMat {
        &self.half_inverse_qft * &self.block * &self.split * &self.mix * &self.shift * &self.qft
    }
}

/// Dense matrix of one transform step computed from its circuit.
pub fn qswt_matrix(n: u32) -> Result<CMat> {
    let layout = RegisterLayout::new(&[("x", n as usize)])?;
    let mut circ = Circuit::new(layout.clone());
    circ.extend(qswt_ops(&layout.qubits("x")?)?)?;
    circuit_matrix(&circ)
}

/// Block dimensions `[2^{n−r}, 2^{n−r}, 2^{n−r+1}, …, 2^{n−1}]`.
pub fn scale_dims(n: u32, r: u32) -> Vec<usize> {
    let mut d = vec![1usize << (n - r)];
    d.extend((n - r..n).map(|s| 1usize << s));
    d
}

/// Recursive transform `W = S_(r−1) ⋯ S_(0)` on `qubits`: step `s` acts on
/// the low `m − s` qubits when the top `s` qubits are all zero.
pub fn multiscale_ops(qubits: &[usize], r: u32) -> Result<Vec<Op>> {
    let m = qubits.len() as u32;
    if r < 1 || r + 1 > m {
        return Err(Error::Range(format!("scale count r={r} outside [1, {}]", m.saturating_sub(1))));
    }
    let mut ops = Vec::new();
    for s in 0..r as usize {
        let k = qubits.len() - s;
        let controls = qubits[k..].iter().map(|&q| anti(q)).collect();
        ops.push(qswt_block(&qubits[..k])?.when(controls));
    }
    Ok(ops)
}

/// Multiscale decomposition data.
#[derive(Debug, Clone)]
pub struct MultiscalePlan {
    pub n: u32,
    pub r: u32,
    pub dims: Vec<usize>,
    /// The composed unitary `W`.
    pub w: Arc<CMat>,
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), Arc<CMat>>> {
    static C: OnceLock<Mutex<HashMap<(u32, u32), Arc<CMat>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Dense `W` for `(n, r)`, simulated once and cached.
pub fn multiscale_matrix(n: u32, r: u32) -> Result<Arc<CMat>> {
    if let Some(w) = cache().lock().expect("cache").get(&(n, r)) {
        return Ok(w.clone());
    }
    if n > 12 {
        return Err(Error::Config(format!("dense multiscale transform limited to n ≤ 12, got {n}")));
    }
    let layout = RegisterLayout::new(&[("x", n as usize)])?;
    let mut circ = Circuit::new(layout.clone());
    circ.extend(multiscale_ops(&layout.qubits("x")?, r)?)?;
    let w = Arc::new(circuit_matrix(&circ)?);
    cache().lock().expect("cache").insert((n, r), w.clone());
    Ok(w)
}

impl MultiscalePlan {
    pub fn new(n: u32, r: u32) -> Result<Self> {
        if n < 2 || r < 1 || r >= n {
            return Err(Error::Range(format!("scale count r={r} outside [1, n−1] for n={n}")));
        }
        Ok(Self { n, r, dims: scale_dims(n, r), w: multiscale_matrix(n, r)? })
    }

    /// `W A W†`.
    pub fn conjugate(&self, a: &CMat) -> Result<CMat> {
        if a.nrows() != self.w.nrows() || a.ncols() != self.w.ncols() {
            return Err(Error::Dimension(format!("{}×{} matrix for a {}-point plan", a.nrows(), a.ncols(), self.w.nrows())));
        }
        Ok(&*self.w * a * self.w.adjoint())
    }

    pub fn offsets(&self) -> Vec<usize> {
        self.dims
            .iter()
            .scan(0, |o, d| {
                let start = *o;
                *o += d;
                Some(start)
            })
            .collect()
    }
}

/// Sup-norm of every off-diagonal block; the diagonal of the result is 0.
pub fn block_coupling_report(a: &CMat, dims: &[usize]) -> Result<Vec<Vec<f64>>> {
    let total: usize = dims.iter().sum();
    if a.nrows() != total || a.ncols() != total {
        return Err(Error::Dimension(format!("{}×{} matrix for blocks summing to {total}", a.nrows(), a.ncols())));
    }
    let offs: Vec<usize> = dims
        .iter()
        .scan(0, |o, d| {
            let s = *o;
            *o += d;
            Some(s)
        })
        .collect();
    let k = dims.len();
    let mut rep = vec![vec![0.0; k]; k];
    for p in 0..k {
        for q in 0..k {
            if p != q {
                let v = a.view((offs[p], offs[q]), (dims[p], dims[q])).into_owned();
                rep[p][q] = max_abs(&v);
            }
        }
    }
    Ok(rep)
}

pub fn max_coupling(report: &[Vec<f64>]) -> f64 {
    report.iter().flatten().copied().fold(0.0, f64::max)
}

/// Diagonal block `idx` of a matrix partitioned by `dims`.
pub fn diagonal_block(a: &CMat, dims: &[usize], idx: usize) -> CMat {
    let off: usize = dims[..idx].iter().sum();
    a.view((off, off), (dims[idx], dims[idx])).into_owned()
}

/// Conjugates an encoding by `W`: the new block is `W B W†`.
pub fn multiscale(encoding: &BlockEncodingSpec, r: u32) -> Result<(MultiscalePlan, BlockEncodingSpec)> {
    let layout = encoding.circuit.layout.clone();
    let sys = layout.qubits(&encoding.system)?;
    let n = sys.len() as u32;
    let plan = MultiscalePlan::new(n, r)?;
    let w_ops = multiscale_ops(&sys, r)?;
    let mut circuit = Circuit::new(layout);
    for op in w_ops.iter().rev() {
        circuit.push(op.adjoint())?;
    }
    circuit.push(Op::Block { label: encoding.label.clone(), ops: encoding.circuit.ops.clone(), cost: None })?;
    circuit.extend(w_ops)?;
    circuit.scratch = encoding.circuit.scratch;
    let spec = BlockEncodingSpec {
        circuit,
        system: encoding.system.clone(),
        zero: encoding.zero.clone(),
        alpha: encoding.alpha,
        phase: encoding.phase,
        epsilon: encoding.epsilon,
        label: format!("multiscale_{}", encoding.label),
    };
    Ok((plan, spec))
}

/// Elementary tally of one transform step on `m` qubits.
pub fn qswt_cost(m: u32) -> Result<GateCounts> {
    let layout = RegisterLayout::new(&[("x", m as usize)])?;
    let mut circ = Circuit::new(layout.clone());
    circ.extend(qswt_ops(&layout.qubits("x")?)?)?;
    let t = circ.tally();
    Ok(t.gates + t.analytic)
}
