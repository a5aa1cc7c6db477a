//! Diagonal wavelet preconditioning, nullspace projection, benchmark
//! elliptic operators and the emulated linear solve.
//!
//! The solve replaces quantum matrix inversion by an exact dense
//! pseudo-inverse of the block-encoded preconditioned matrix; everything
//! around it (multiscale transform, preconditioner, projection) is the
//! circuit-level construction.

use crate::block_encoding::{self, BlockEncodingSpec, PrepKind, SYSTEM};
use crate::linalg::{cis, kron, singular_values, ONE, ZERO};
use crate::qsim::{
    anti, circuit_matrix, ctl, Circuit, GateCounts, Op, RegisterLayout, Statevector, TALLY_QUBIT_CAP,
};
use crate::qswt::{self, MultiscalePlan};
use crate::slac::{self, LatticeConfig, Order, Variant};
use crate::{CMat, CVec, Error, Result, C64};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default relative tolerance below which singular values count as null.
pub const NULL_TOL: f64 = 1e-8;

/// Dyadic level of index `x`: 0 for `x < 2`, else `⌊log₂ x⌋`.
pub fn level_of(x: usize) -> u32 {
    if x < 2 {
        0
    } else {
        usize::BITS - 1 - x.leading_zeros()
    }
}

/// Diagonal preconditioner with weights `2^{−e·ℓ}` on level `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Preconditioner {
    n: u32,
    exponent: f64,
    weights: Vec<f64>,
}

impl Preconditioner {
    pub fn new(n: u32, exponent: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("preconditioner needs n ≥ 2, got {n}")));
        }
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return Err(Error::Config(format!("exponent {exponent} must be finite and nonnegative")));
        }
        let size = LatticeConfig::new(n)?.size();
        let weights = (0..size).map(|x| 2f64.powf(-exponent * level_of(x) as f64)).collect();
        Ok(Self { n, exponent, weights })
    }

    /// All-ones diagonal.
    pub fn identity(n: u32) -> Result<Self> {
        Self::new(n, 0.0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dense(&self) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(self.weights.len(), self.weights.iter().map(|&w| C64::new(w, 0.0))))
    }

    /// `θ_ℓ = arccos(2^{−eℓ})`.
    pub fn angle(&self, level: u32) -> f64 {
        2f64.powf(-self.exponent * level as f64).clamp(-1.0, 1.0).acos()
    }
}

/// Diagonals of `U^± = P ± i√(1 − P²) = e^{±i arccos P}`.
pub fn u_plus_minus(pre: &Preconditioner) -> (Vec<C64>, Vec<C64>) {
    let plus = pre.weights.iter().map(|&w| cis(w.acos())).collect();
    let minus = pre.weights.iter().map(|&w| cis(-w.acos())).collect();
    (plus, minus)
}

/// Registered cost of `U^±` with a sawtooth control ladder: linear in `n`.
pub fn u_pm_cost(n: u32) -> GateCounts {
    let k = n as u64 - 1;
    GateCounts { toffoli: 2 * k, cx: 2 * k, clifford: 0, rotation: 3 * k, qft_calls: 0 }
}

/// `U^±` on `qubits`: a phase `±θ_ℓ` on qubit `ℓ` when all higher qubits
/// are zero, for `ℓ = n−1, …, 1`.
pub fn u_pm_op(pre: &Preconditioner, qubits: &[usize], plus: bool) -> Result<Op> {
    let n = pre.n as usize;
    if qubits.len() != n {
        return Err(Error::Dimension(format!("{} qubits for an n={n} preconditioner", qubits.len())));
    }
    let sign = if plus { 1.0 } else { -1.0 };
    let mut ops = Vec::with_capacity(n - 1);
    for level in (1..n).rev() {
        let controls = qubits[level + 1..].iter().map(|&q| anti(q)).collect();
        ops.push(Op::phase(qubits[level], sign * pre.angle(level as u32)).when(controls));
    }
    let label = if plus { "u_plus" } else { "u_minus" };
    Ok(Op::Block { label: label.into(), ops, cost: Some(u_pm_cost(pre.n)) })
}

/// Dense matrix of the `U^±` circuit.
pub fn u_pm_matrix(pre: &Preconditioner, plus: bool) -> Result<CMat> {
    let layout = RegisterLayout::new(&[(SYSTEM, pre.n as usize)])?;
    let mut c = Circuit::new(layout.clone());
    c.push(u_pm_op(pre, &layout.qubits(SYSTEM)?, plus)?)?;
    circuit_matrix(&c)
}

/// `U_P = (H ⊗ I) Λ₀(U⁺) Λ₁(U⁻) (H ⊗ I)` with ancilla `p`.
pub fn precond_op(pre: &Preconditioner, p: usize, qubits: &[usize]) -> Result<Op> {
    let ops = vec![
        Op::h(p),
        u_pm_op(pre, qubits, true)?.when(vec![anti(p)]),
        u_pm_op(pre, qubits, false)?.when(vec![ctl(p)]),
        Op::h(p),
    ];
    Ok(Op::Block { label: "precond".into(), ops, cost: None })
}

/// `(1, 1, 0)`-encoding of `P`.
pub fn precond_block_encoding(pre: &Preconditioner) -> Result<BlockEncodingSpec> {
    let layout = RegisterLayout::new(&[("p", 1), (SYSTEM, pre.n as usize)])?;
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(precond_op(pre, layout.qubit("p", 0)?, &layout.qubits(SYSTEM)?)?)?;
    Ok(BlockEncodingSpec {
        circuit,
        system: SYSTEM.into(),
        zero: vec!["p".into()],
        alpha: 1.0,
        phase: ONE,
        epsilon: Some(0.0),
        label: "precond".into(),
    })
}

/// Encoding of `P W A W† P` from an encoding of `A`, using one
/// preconditioner ancilla per side.
pub fn preconditioned_encoding(
    encoding: &BlockEncodingSpec,
    r: u32,
    pre: &Preconditioner,
) -> Result<BlockEncodingSpec> {
    let (_, ms) = qswt::multiscale(encoding, r)?;
    let mut spec: Vec<(&str, usize)> = vec![("p1", 1), ("p2", 1)];
    for reg in ms.circuit.layout.registers() {
        spec.push((reg.name.as_str(), reg.width));
    }
    let layout = RegisterLayout::with_cap(&spec, TALLY_QUBIT_CAP)?;
    let inner = ms.circuit.embed(&layout)?;
    let sys = layout.qubits(&encoding.system)?;
    if sys.len() != pre.n as usize {
        return Err(Error::Dimension("preconditioner and encoding sizes differ".into()));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(precond_op(pre, layout.qubit("p1", 0)?, &sys)?)?;
    circuit.extend(inner.ops)?;
    circuit.push(precond_op(pre, layout.qubit("p2", 0)?, &sys)?)?;
    circuit.scratch = inner.scratch;
    let mut zero = ms.zero.clone();
    zero.push("p1".into());
    zero.push("p2".into());
    Ok(BlockEncodingSpec {
        circuit,
        system: encoding.system.clone(),
        zero,
        alpha: encoding.alpha,
        phase: encoding.phase,
        epsilon: encoding.epsilon,
        label: format!("preconditioned_{}", encoding.label),
    })
}

// --------------------------------------------------------- nullspace ---

/// `I − |ψ⟩⟨ψ|` for a unit null vector `ψ`.
#[derive(Debug, Clone)]
pub struct NullspaceProjector {
    pub null: CVec,
}

impl NullspaceProjector {
    pub fn new(null: CVec) -> Result<Self> {
        let nrm = null.norm();
        if nrm == 0.0 {
            return Err(Error::Config("zero null vector".into()));
        }
        Ok(Self { null: null / C64::new(nrm, 0.0) })
    }

    /// The `k = 0` Fourier mode `H^{⊗n}|0⟩`.
    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(CVec::from_element(size, ONE))
    }

    /// Projected vector and whether it vanished.
    pub fn project(&self, b: &CVec) -> (CVec, bool) {
        let out = b - &self.null * self.null.dotc(b);
        let zero = out.norm() <= 1e-12 * b.norm().max(f64::MIN_POSITIVE);
        (out, zero)
    }

    pub fn matrix(&self) -> CMat {
        let n = self.null.len();
        CMat::identity(n, n) - &self.null * self.null.adjoint()
    }
}

/// Outcome of the swap-test projection.
#[derive(Debug, Clone)]
pub struct SwapTestOutcome {
    /// Probability of the flag reading 1 with the reference returned to 0.
    pub probability: f64,
    /// Normalised system state on that branch, if any.
    pub state: Option<Vec<C64>>,
    /// Unnormalised system component, `(I − |ψ⟩⟨ψ|) b / 2`.
    pub residual: Vec<C64>,
}

/// Swap-test circuit on `(s, r, fl)`: load `b` on `s` and `ψ` on `r`,
/// controlled-swap between Hadamards on `fl`, then unload `ψ` from `r`.
pub fn swap_test_circuit(b: &[C64], null: &[C64]) -> Result<Circuit> {
    if b.len() != null.len() || !b.len().is_power_of_two() || b.len() < 2 {
        return Err(Error::Dimension(format!("swap test on {} and {} amplitudes", b.len(), null.len())));
    }
    let n = b.len().trailing_zeros() as usize;
    let unit = |v: &[C64]| -> Result<Arc<Vec<C64>>> {
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(Error::Config("zero vector in swap test".into()));
        }
        Ok(Arc::new(v.iter().map(|z| z / nrm).collect()))
    };
    let layout = RegisterLayout::new(&[("s", n), ("r", n), ("fl", 1)])?;
    let s = layout.qubits("s")?;
    let r = layout.qubits("r")?;
    let fl = layout.qubit("fl", 0)?;
    let psi = unit(null)?;
    let mut c = Circuit::new(layout);
    c.push(Op::Load { qubits: s.clone(), target: unit(b)?, adjoint: false, controls: vec![] })?;
    c.push(Op::Load { qubits: r.clone(), target: psi.clone(), adjoint: false, controls: vec![] })?;
    c.push(Op::h(fl))?;
    for k in 0..n {
        c.push(Op::Swap { a: s[k], b: r[k], controls: vec![ctl(fl)] })?;
    }
    c.push(Op::h(fl))?;
    c.push(Op::Load { qubits: r, target: psi, adjoint: true, controls: vec![] })?;
    Ok(c)
}

/// Circuit realisation of the nullspace projection, postselecting `fl = 1`
/// and `r = 0`.
pub fn swap_test_projection(b: &[C64], null: &[C64]) -> Result<SwapTestOutcome> {
    let c = swap_test_circuit(b, null)?;
    let mut sv = Statevector::new(c.layout.clone())?;
    sv.run(&c)?;
    let p = sv.project_and_extract(&[("r", 0), ("fl", 1)])?;
    let state = if p.probability > 1e-24 { p.normalized() } else { None };
    Ok(SwapTestOutcome { probability: p.probability, state, residual: p.residual })
}

/// Dense path of the projection.
pub fn project_rhs(b: &CVec, null: &CVec) -> Result<(CVec, bool)> {
    Ok(NullspaceProjector::new(null.clone())?.project(b))
}

// ---------------------------------------------------------- analysis ---

/// `σ_max/σ_min`. With `project`, singular values below `null_tol·σ_max`
/// are discarded; without it a numerically zero `σ_min` gives `∞`.
pub fn condition_number(m: &CMat, project: bool, null_tol: f64) -> Result<f64> {
    let s = singular_values(m);
    let smax = *s.first().ok_or_else(|| Error::Dimension("empty matrix".into()))?;
    if smax == 0.0 {
        return Err(Error::Singular("zero matrix".into()));
    }
    if project {
        let kept: Vec<f64> = s.iter().copied().filter(|&v| v > null_tol * smax).collect();
        let smin = *kept.last().ok_or_else(|| Error::Singular("all singular values below tolerance".into()))?;
        Ok(smax / smin)
    } else {
        let smin = *s.last().expect("nonempty");
        Ok(if smin <= null_tol * smax { f64::INFINITY } else { smax / smin })
    }
}

/// Range of `w_ℓ² j²` over the momenta `j` of one dyadic band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub level: u32,
    pub min: f64,
    pub max: f64,
}

/// Rescaled eigenvalue ranges per band: level 0 holds `j = 1`, level
/// `ℓ ≥ 1` holds `j ∈ [2^{ℓ−1}, 2^ℓ]`, with `w_ℓ = 2^{−ℓ}`. The edge
/// momentum `2^{ℓ−1}` is shared with the band below, since the wavelet step
/// splits the `±N/4` pair between the two halves.
pub fn dyadic_band_check(n: u32) -> Result<Vec<Band>> {
    if n < 3 {
        return Err(Error::Config(format!("band check needs n ≥ 3, got {n}")));
    }
    let mut out = vec![Band { level: 0, min: 1.0, max: 1.0 }];
    for level in 1..n {
        let w2 = 4f64.powi(-(level as i32));
        let lo = 1u64 << (level - 1);
        let hi = 1u64 << level;
        let vals: Vec<f64> = (lo..=hi).map(|j| w2 * (j * j) as f64).collect();
        out.push(Band {
            level,
            min: vals.iter().copied().fold(f64::INFINITY, f64::min),
            max: vals.iter().copied().fold(0.0, f64::max),
        });
    }
    Ok(out)
}

/// `P W A W† P` for the full multiscale transform `r = n − 1`.
pub fn preconditioned_dense(a: &CMat, pre: &Preconditioner) -> Result<CMat> {
    let plan = MultiscalePlan::new(pre.n, pre.n - 1)?;
    let p = pre.dense();
    Ok(&p * plan.conjugate(a)? * &p)
}

// -------------------------------------------------------- benchmarks ---

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Benchmark {
    L1,
    L2,
    L3,
    L4,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::L1, Benchmark::L2, Benchmark::L3, Benchmark::L4];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::L1 => "L1",
            Benchmark::L2 => "L2",
            Benchmark::L3 => "L3",
            Benchmark::L4 => "L4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L1" => Ok(Benchmark::L1),
            "L2" => Ok(Benchmark::L2),
            "L3" => Ok(Benchmark::L3),
            "L4" => Ok(Benchmark::L4),
            other => Err(Error::Config(format!("unknown benchmark `{other}`"))),
        }
    }
}

/// Principal-coefficient samples and the uniform ellipticity bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipticity {
    pub principal: Vec<f64>,
    pub minimum: f64,
    /// Analytic lower bound `θ`.
    pub bound: f64,
}

/// Grid `x_k = k/N` on the periodic unit interval.
pub fn grid(size: usize) -> Vec<f64> {
    (0..size).map(|k| k as f64 / size as f64).collect()
}

fn diag(v: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0))))
}

/// Physical first derivative on `[0, 1]`: `N · Δ̃^(1)`.
pub fn derivative_matrix(n: u32) -> Result<CMat> {
    let cfg = LatticeConfig::new(n)?;
    Ok(slac::truncated_first_order(cfg).to_dense()? * C64::new(cfg.size() as f64, 0.0))
}

/// Physical Laplacian on `[0, 1]`: `N² · Δ̃^(2)`.
pub fn laplacian_matrix(n: u32) -> Result<CMat> {
    let cfg = LatticeConfig::new(n)?;
    let s = cfg.size() as f64;
    Ok(slac::truncated_laplacian(cfg).to_dense()? * C64::new(s * s, 0.0))
}

/// Dense benchmark operator and its ellipticity data.
///
/// * `L1 = Δ − ∂ + 1`
/// * `L2 = −∂ cosh(x/4) ∂ + e^x`
/// * `L3 = −Δ + 1 + sin²(2πx)`
/// * `L4 = −∂ (1 + ε cos 2πx) ∂ + 1`
pub fn benchmark_operator(which: Benchmark, n: u32, eps: f64) -> Result<(CMat, Ellipticity)> {
    if which == Benchmark::L4 && !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("L4 needs 0 < ε < 1, got {eps}")));
    }
    let size = LatticeConfig::new(n)?.size();
    let x = grid(size);
    let d = derivative_matrix(n)?;
    let l = laplacian_matrix(n)?;
    let id = CMat::identity(size, size);
    let (a, principal, bound) = match which {
        Benchmark::L1 => (&l - &d + &id, vec![1.0; size], 1.0),
        Benchmark::L2 => {
            let c: Vec<f64> = x.iter().map(|v| (v / 4.0).cosh()).collect();
            let e: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            (-(&d * diag(&c) * &d) + diag(&e), c, 1.0)
        }
        Benchmark::L3 => {
            let v: Vec<f64> = x.iter().map(|v| 1.0 + (2.0 * PI * v).sin().powi(2)).collect();
            (-&l + diag(&v), vec![1.0; size], 1.0)
        }
        Benchmark::L4 => {
            let c: Vec<f64> = x.iter().map(|v| 1.0 + eps * (2.0 * PI * v).cos()).collect();
            (-(&d * diag(&c) * &d) + &id, c, 1.0 - eps)
        }
    };
    let minimum = principal.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((a, Ellipticity { principal, minimum, bound }))
}

/// One row of a condition-number sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u32,
    pub size: usize,
    pub kappa: f64,
    pub kappa_p: f64,
}

/// Condition numbers with and without the multiscale preconditioner.
pub fn condition_sweep(which: Benchmark, ns: &[u32], exponent: f64, eps: f64, null_tol: f64) -> Result<Vec<SweepRow>> {
    let rows = crate::qsim::par_map(ns.len(), |i| -> Result<SweepRow> {
        let n = ns[i];
        let (a, _) = benchmark_operator(which, n, eps)?;
        let pre = Preconditioner::new(n, exponent)?;
        let ap = preconditioned_dense(&a, &pre)?;
        Ok(SweepRow {
            n,
            size: 1 << n,
            kappa: condition_number(&a, false, null_tol)?,
            kappa_p: condition_number(&ap, false, null_tol)?,
        })
    });
    rows.into_iter().collect()
}

// ------------------------------------------------------------- solve ---

/// Operator of a model problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PdeOperator {
    /// SLAC Laplacian in lattice units.
    Laplacian(Variant),
    Benchmark { which: Benchmark, eps: f64 },
}

#[derive(Debug, Clone)]
pub struct PdeProblem {
    /// 1 or 2.
    pub dimension: usize,
    /// Qubits per axis.
    pub n: u32,
    pub operator: PdeOperator,
    /// Right-hand side on the full grid (row-major in 2D).
    pub rhs: CVec,
    pub project_nullspace: bool,
    /// Preconditioner exponent.
    pub exponent: f64,
    /// Relative tolerance for null singular values.
    pub null_tol: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Condition number of the (projected) operator, 1D only.
    pub kappa: Option<f64>,
    /// Condition number of the preconditioned multiscale operator, 1D only.
    pub kappa_p: Option<f64>,
    /// `‖A u − b⊥‖ / ‖b⊥‖`.
    pub residual: f64,
    /// Fidelity of `u` with the spectral solution, when one exists.
    pub fidelity: Option<f64>,
    /// Set when the right-hand side vanishes after projection.
    pub zero_rhs: bool,
    /// Wavelet transform calls per application of `A_p`.
    pub qswt_calls: u64,
    /// Encoding calls per application of `A_p`.
    pub encoding_calls: u64,
    /// `|⟨H^{⊗n}0 | Wψ₀⟩|²`: overlap of the uniform state with the
    /// multiscale image of the position-space null vector.
    pub null_overlap: f64,
    /// `‖A_w · Wψ₀‖`, the kernel residual in the multiscale basis.
    pub null_residual: f64,
    /// `‖u_{ab} − u‖/‖u‖` between the four-term sum and the direct sandwich.
    pub branch_mismatch: f64,
    pub solution: CVec,
}

fn operator_1d(op: PdeOperator, n: u32) -> Result<CMat> {
    match op {
        PdeOperator::Laplacian(Variant::Truncated) => slac::truncated_laplacian(LatticeConfig::new(n)?).to_dense(),
        PdeOperator::Laplacian(Variant::Exact) => slac::exact_laplacian(LatticeConfig::new(n)?).to_dense(),
        PdeOperator::Benchmark { which, eps } => Ok(benchmark_operator(which, n, eps)?.0),
    }
}

fn laplacian_coeffs(op: PdeOperator, n: u32) -> Result<Option<Vec<C64>>> {
    let cfg = LatticeConfig::new(n)?;
    Ok(match op {
        PdeOperator::Laplacian(Variant::Truncated) => Some(slac::truncated_laplacian(cfg).coeffs),
        PdeOperator::Laplacian(Variant::Exact) => Some(slac::exact_laplacian(cfg).coeffs),
        PdeOperator::Benchmark { .. } => None,
    })
}

/// Weights `2^{−e·max(ℓ_x, ℓ_y)}` of the two-dimensional preconditioner.
pub fn preconditioner_2d(n: u32, exponent: f64) -> Result<CMat> {
    let size = LatticeConfig::new(n)?.size();
    let mut w = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            w.push(2f64.powf(-exponent * level_of(x).max(level_of(y)) as f64));
        }
    }
    Ok(diag(&w))
}

/// Spectral solution of a circulant system on `b ⊥ 1` (minimum norm).
pub fn spectral_solve_1d(coeffs: &[C64], b: &CVec) -> CVec {
    let lam = slac::circulant_spectrum(coeffs);
    spectral_apply(&[lam], b)
}

/// Spectral solution of `(A ⊗ I + I ⊗ A) u = b` on `b ⊥ 1`.
pub fn spectral_solve_2d(coeffs: &[C64], b: &CVec) -> CVec {
    let lam = slac::circulant_spectrum(coeffs);
    spectral_apply(&[lam.clone(), lam], b)
}

fn spectral_apply(lams: &[Vec<C64>], b: &CVec) -> CVec {
    let size = lams[0].len();
    let f = crate::linalg::dft_matrix(size);
    let mut fm = f.clone();
    for _ in 1..lams.len() {
        fm = kron(&fm, &f);
    }
    // Columns of `fm` are the joint eigenvectors.
    let bh = fm.adjoint() * b;
    let mut uh = CVec::zeros(bh.len());
    for (idx, z) in bh.iter().enumerate() {
        let mut lam = ZERO;
        let mut rest = idx;
        for l in lams.iter().rev() {
            lam += l[rest % size];
            rest /= size;
        }
        if lam.norm() > 1e-12 {
            uh[idx] = z / lam;
        }
    }
    fm * uh
}

fn scale_sym(m: &CMat, d: &[f64]) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * d[r] * d[c])
}

fn hadamard(d: &[C64], v: &CVec) -> CVec {
    CVec::from_iterator(v.len(), d.iter().zip(v.iter()).map(|(x, y)| x * y))
}

/// `(W^{⊗d}) v` or its adjoint for `d ∈ {1, 2}`, with `v` row-major in 2D.
fn apply_tensor(w: &CMat, v: &CVec, dimension: usize, adjoint: bool) -> CVec {
    let m = if adjoint { w.adjoint() } else { w.clone() };
    if dimension == 1 {
        return &m * v;
    }
    let size = m.nrows();
    let grid = CMat::from_row_slice(size, size, v.as_slice());
    let out = &m * grid * m.transpose();
    CVec::from_iterator(size * size, (0..size * size).map(|i| out[(i / size, i % size)]))
}

/// Solves `A u = b` through the preconditioned multiscale system
/// `A_p = P W A W† P`, inverting `A_p` exactly on the complement of its
/// kernel and assembling `u = ¼ Σ_{a,b} W† U^a A_p^+ U^b W b`.
pub fn emulated_solve(problem: &PdeProblem) -> Result<SolveReport> {
    let n = problem.n;
    let dimension = problem.dimension;
    if !(1..=2).contains(&dimension) {
        return Err(Error::Config(format!("dimension {dimension} not supported")));
    }
    if dimension == 2 && !matches!(problem.operator, PdeOperator::Laplacian(_)) {
        return Err(Error::Config("two-dimensional solves support the Laplacian only".into()));
    }
    if problem.project_nullspace && !matches!(problem.operator, PdeOperator::Laplacian(_)) {
        return Err(Error::Config("benchmark operators have a trivial nullspace; solve without projection".into()));
    }
    let size = LatticeConfig::new(n)?.size();
    let dim = size.pow(dimension as u32);
    if problem.rhs.len() != dim {
        return Err(Error::Dimension(format!("right-hand side of length {} for {dim} unknowns", problem.rhs.len())));
    }
    let a1 = operator_1d(problem.operator, n)?;
    let plan = MultiscalePlan::new(n, n - 1)?;
    let aw1 = plan.conjugate(&a1)?;
    let w = &*plan.w;
    let (a, aw, weights) = if dimension == 1 {
        (a1, aw1, Preconditioner::new(n, problem.exponent)?.weights().to_vec())
    } else {
        let id = CMat::identity(size, size);
        let p2 = preconditioner_2d(n, problem.exponent)?;
        (
            kron(&a1, &id) + kron(&id, &a1),
            kron(&aw1, &id) + kron(&id, &aw1),
            p2.diagonal().iter().map(|z| z.re).collect(),
        )
    };
    let u_plus: Vec<C64> = weights.iter().map(|&x| cis(x.clamp(-1.0, 1.0).acos())).collect();
    let u_minus: Vec<C64> = u_plus.iter().map(|z| z.conj()).collect();

    let null = NullspaceProjector::uniform(dim)?;
    let (b, zero_rhs) = if problem.project_nullspace {
        null.project(&problem.rhs)
    } else {
        (problem.rhs.clone(), problem.rhs.norm() == 0.0)
    };

    let nt = n.max(3);
    let enc = block_encoding::assemble(Order::Second, nt, PrepKind::Analytic)?;
    let tally = preconditioned_encoding(&enc, nt - 1, &Preconditioner::new(nt, problem.exponent)?)?.tally();
    let qswt_calls = tally.calls(qswt::QSWT_LABEL) * dimension as u64;
    let encoding_calls = tally.calls(&enc.label);

    let wpsi = apply_tensor(w, &null.null, dimension, false);
    let null_overlap = null.null.dotc(&wpsi).norm_sqr();
    let null_residual = (&aw * &wpsi).norm();

    if zero_rhs {
        return Ok(SolveReport {
            kappa: None,
            kappa_p: None,
            residual: 0.0,
            fidelity: None,
            zero_rhs: true,
            qswt_calls,
            encoding_calls,
            null_overlap,
            null_residual,
            branch_mismatch: 0.0,
            solution: CVec::zeros(dim),
        });
    }

    let ap = scale_sym(&aw, &weights);
    let mut deflated = ap.clone();
    if problem.project_nullspace {
        let v = CVec::from_iterator(dim, wpsi.iter().zip(&weights).map(|(z, p)| z / *p));
        let v = &v / C64::new(v.norm(), 0.0);
        deflated += &v * v.adjoint();
    }
    let lu = deflated.lu();
    let solve = |rhs: &CVec| -> Result<CVec> {
        lu.solve(rhs).ok_or_else(|| Error::Singular("preconditioned operator is singular after projection".into()))
    };

    let wb = apply_tensor(w, &b, dimension, false);
    let branches = [&u_plus, &u_minus];
    let mut u = CVec::zeros(dim);
    for ua in branches {
        for ub in branches {
            let y = hadamard(ua, &solve(&hadamard(ub, &wb))?);
            u += apply_tensor(w, &y, dimension, true);
        }
    }
    u *= C64::new(0.25, 0.0);
    let pc: Vec<C64> = weights.iter().map(|&x| C64::new(x, 0.0)).collect();
    let direct = apply_tensor(w, &hadamard(&pc, &solve(&hadamard(&pc, &wb))?), dimension, true);
    let branch_mismatch = (&u - &direct).norm() / direct.norm().max(f64::MIN_POSITIVE);
    if problem.project_nullspace {
        u = null.project(&u).0;
    }
    let residual = (&a * &u - &b).norm() / b.norm();

    let fidelity = match laplacian_coeffs(problem.operator, n)? {
        Some(c) => {
            let oracle = if dimension == 1 { spectral_solve_1d(&c, &b) } else { spectral_solve_2d(&c, &b) };
            Some(crate::linalg::fidelity(u.as_slice(), oracle.as_slice()))
        }
        None => None,
    };
    let (kappa, kappa_p) = if dimension == 1 {
        (
            Some(condition_number(&a, problem.project_nullspace, problem.null_tol)?),
            Some(condition_number(&ap, problem.project_nullspace, problem.null_tol)?),
        )
    } else {
        (None, None)
    };
    Ok(SolveReport {
        kappa,
        kappa_p,
        residual,
        fidelity,
        zero_rhs: false,
        qswt_calls,
        encoding_calls,
        null_overlap,
        null_residual,
        branch_mismatch,
        solution: u,
    })
}

/// A single Fourier mode `e^{2πikx/N}` as a right-hand side.
pub fn fourier_mode(size: usize, k: i64) -> CVec {
    CVec::from_iterator(size, (0..size).map(|x| cis(2.0 * PI * (k as f64) * x as f64 / size as f64)))
}
