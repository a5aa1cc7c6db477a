//! LCU block-encodings of the SLAC operators.
//!
//! `U = PREP† · COPY · SELECT · (SIGN | PHASE) · PREP`, with every register
//! except `sys` projected onto zero. The encoded operator is
//! `α · phase · block`, where `phase` is the global sign dropped from the
//! circuit.

use crate::linalg::{cis, max_abs, op_norm, ZERO};
use crate::qsim::{
    anti, ctl, extract_block, value_controls, Circuit, Control, GateTally, Mat2, Op, PredicateFn,
    RegisterLayout, TALLY_QUBIT_CAP,
};
use crate::slac::{self, LatticeConfig, Order};
use crate::state_prep::{self, accept_count, PrepConfig};
use crate::{CMat, Error, Result, C64};
use std::f64::consts::PI;
use std::sync::Arc;

/// Name of the system register in every encoding.
pub const SYSTEM: &str = "sys";

/// A unitary circuit together with the data needed to read off its block.
#[derive(Debug, Clone)]
pub struct BlockEncodingSpec {
    pub circuit: Circuit,
    pub system: String,
    /// Registers projected onto zero.
    pub zero: Vec<String>,
    /// Subnormalisation.
    pub alpha: f64,
    /// Global phase carried outside the circuit.
    pub phase: C64,
    /// Declared bound on `‖α·phase·block − target‖`.
    pub epsilon: Option<f64>,
    pub label: String,
}

impl BlockEncodingSpec {
    /// `(⟨0|_anc ⊗ I) U (|0⟩_anc ⊗ I)` on the system register.
    pub fn block(&self) -> Result<CMat> {
        let zero: Vec<&str> = self.zero.iter().map(String::as_str).collect();
        extract_block(&self.circuit, &self.system, &zero)
    }

    /// The represented operator `α · phase · block`.
    pub fn encoded(&self) -> Result<CMat> {
        Ok(self.block()? * (self.phase * self.alpha))
    }

    pub fn system_qubits(&self) -> Result<usize> {
        self.circuit.layout.width(&self.system)
    }

    /// Qubits outside the system register.
    pub fn ancillas(&self) -> usize {
        self.circuit.layout.total() - self.system_qubits().unwrap_or(0)
    }

    pub fn tally(&self) -> GateTally {
        self.circuit.tally()
    }
}

/// Source of the PREP stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepKind {
    /// Exact amplitudes loaded by a single oracle (`M → ∞`).
    Analytic,
    /// Nested-box inequality-test circuit with reference width `n_ref`.
    GateLevel { n_ref: u32 },
}

/// Register list of an assembled encoding.
pub fn slac_registers(order: Order, n: u32, kind: PrepKind) -> Result<Vec<(&'static str, usize)>> {
    let mut regs = match kind {
        PrepKind::Analytic => {
            let mut v = vec![("j", n as usize - 1), ("d", 1)];
            if order == Order::Second {
                v.push(("a", 1));
            }
            v.push(("f", 1));
            v
        }
        PrepKind::GateLevel { n_ref } => state_prep::prep_registers(&PrepConfig::new(n, n_ref, order)?),
    };
    regs.push(("C", 1));
    regs.push((SYSTEM, n as usize));
    Ok(regs)
}

pub fn slac_layout(order: Order, n: u32, kind: PrepKind) -> Result<RegisterLayout> {
    if n < 3 {
        return Err(Error::Config(format!("encodings need n ≥ 3, got {n}")));
    }
    RegisterLayout::with_cap(&slac_registers(order, n, kind)?, TALLY_QUBIT_CAP)
}

fn success_controls(layout: &RegisterLayout, order: Order) -> Result<Vec<Control>> {
    let mut c = vec![anti(layout.qubit("f", 0)?)];
    if order == Order::Second {
        c.push(ctl(layout.qubit("a", 0)?));
    }
    Ok(c)
}

/// SELECT: on the success branch adds `j` to `sys` when `d = 1` (applying
/// `P^j`) and subtracts it when `d = 0` (applying `P^{N−j}`).
pub fn select_oracle(layout: &RegisterLayout, order: Order) -> Result<Circuit> {
    let sys = layout.qubits(SYSTEM)?;
    let size = 1u64 << sys.len();
    let d = layout.qubit("d", 0)?;
    let base = success_controls(layout, order)?;
    let mut c = Circuit::new(layout.clone());
    for (i, jq) in layout.qubits("j")?.into_iter().enumerate() {
        let step = (1u64 << i) % size;
        let mut plus = vec![ctl(jq), ctl(d)];
        plus.extend(&base);
        let mut minus = vec![ctl(jq), anti(d)];
        minus.extend(&base);
        c.push(Op::add_const(sys.clone(), step).when(plus))?;
        c.push(Op::add_const(sys.clone(), (size - step) % size).when(minus))?;
    }
    Ok(c)
}

/// SIGN: `Z` on the least significant bit of `j`, giving `(−1)^j`. With the
/// tracked global `−1` this is the coefficient sign `(−1)^{1+j}`.
pub fn sign_oracle(layout: &RegisterLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.clone());
    c.push(Op::z(layout.qubit("j", 0)?))?;
    Ok(c)
}

/// `α = π(1 + 1/N)`.
pub fn phase_angle(n: u32) -> f64 {
    PI * (1.0 + 1.0 / (1u64 << n) as f64)
}

/// PHASE: `|j⟩ → e^{iαj}|j⟩` from per-bit phases `α·2^k`.
pub fn phase_oracle(layout: &RegisterLayout, n: u32) -> Result<Circuit> {
    let a = phase_angle(n);
    let mut c = Circuit::new(layout.clone());
    for (k, q) in layout.qubits("j")?.into_iter().enumerate() {
        c.push(Op::phase(q, a * (1u64 << k) as f64))?;
    }
    Ok(c)
}

/// Conjugating branch of PHASE: on `d = 0` turns `e^{iαj}` into
/// `−e^{−iαj}`, so the `P^{N−j}` terms carry `−conj(c_j)`.
pub fn conjugate_branch(layout: &RegisterLayout, n: u32) -> Result<Circuit> {
    let a = phase_angle(n);
    let d = layout.qubit("d", 0)?;
    let mut c = Circuit::new(layout.clone());
    for (k, q) in layout.qubits("j")?.into_iter().enumerate() {
        c.push(Op::phase(q, -2.0 * a * (1u64 << k) as f64).when(vec![anti(d)]))?;
    }
    c.extend([Op::x(d), Op::z(d), Op::x(d)])?;
    Ok(c)
}

/// COPY: `C ^= f`, marking the failure branch.
pub fn copy_oracle(layout: &RegisterLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.clone());
    c.push(Op::cx(layout.qubit("f", 0)?, layout.qubit("C", 0)?))?;
    Ok(c)
}

fn prep_circuit(order: Order, n: u32, kind: PrepKind, layout: &RegisterLayout) -> Result<Circuit> {
    let mut c = Circuit::new(layout.clone());
    match kind {
        PrepKind::Analytic => {
            c.push(state_prep::analytic_prep_op(order, n, layout)?)?;
        }
        PrepKind::GateLevel { n_ref } => {
            let cfg = PrepConfig::new(n, n_ref, order)?;
            c.push(Op::Block { label: "prep".into(), ops: state_prep::prep_ops(&cfg, layout)?, cost: None })?;
            c.scratch = state_prep::inequality_cost(n, n_ref, order).ancillas;
        }
    }
    Ok(c)
}

/// The full LCU circuit `PREP† COPY SELECT (SIGN|PHASE) PREP`.
pub fn slac_circuit(order: Order, n: u32, kind: PrepKind) -> Result<Circuit> {
    let layout = slac_layout(order, n, kind)?;
    let prep = prep_circuit(order, n, kind, &layout)?;
    let mut c = prep.clone();
    match order {
        Order::Second => c.append(&sign_oracle(&layout)?)?,
        Order::First => {
            c.append(&phase_oracle(&layout, n)?)?;
            c.append(&conjugate_branch(&layout, n)?)?
        }
    };
    c.append(&select_oracle(&layout, order)?)?;
    c.append(&copy_oracle(&layout)?)?;
    c.append(&prep.adjoint())?;
    Ok(c)
}

/// Rigorous bound `‖α·phase·B − Δ̃‖ ≤ α Σ_i |p_i − |c_i|/α|` for the
/// gate-level path, from the closed-form acceptance counts.
pub fn gate_level_epsilon(cfg: &PrepConfig) -> Result<f64> {
    let n = cfg.n();
    let alpha = state_prep::alpha(cfg.order(), n);
    let size = cfg.size();
    let target = slac::truncated(cfg.order(), LatticeConfig::new(n)?);
    let m = cfg.m_ref() as f64;
    let mut p = vec![0.0; size];
    let lead = match cfg.order() {
        Order::Second => {
            p[0] = state_prep::theta_ini().cos().powi(2);
            state_prep::theta_ini().sin().powi(2)
        }
        Order::First => 1.0,
    };
    for mu in 0..cfg.boxes() {
        let w = 1u64 << mu;
        for j in w..2 * w {
            let q = accept_count(mu, j, cfg.m_ref(), cfg.order()) as f64;
            let v = lead * cfg.box_probability(mu) / w as f64 * q / m / 2.0;
            p[j as usize] += v;
            p[size - j as usize] += v;
        }
    }
    Ok(p.iter().zip(&target.coeffs).map(|(pi, c)| (alpha * pi - c.norm()).abs()).sum())
}

/// Assembled encoding of the truncated SLAC operator of the given order.
pub fn assemble(order: Order, n: u32, kind: PrepKind) -> Result<BlockEncodingSpec> {
    let circuit = slac_circuit(order, n, kind)?;
    let epsilon = match kind {
        PrepKind::Analytic => 0.0,
        PrepKind::GateLevel { n_ref } => gate_level_epsilon(&PrepConfig::new(n, n_ref, order)?)?,
    };
    let zero: Vec<String> =
        circuit.layout.registers().iter().filter(|r| r.name != SYSTEM).map(|r| r.name.clone()).collect();
    Ok(BlockEncodingSpec {
        circuit,
        system: SYSTEM.into(),
        zero,
        alpha: state_prep::alpha(order, n),
        phase: C64::new(-1.0, 0.0),
        epsilon: Some(epsilon),
        label: format!("slac{}", order.as_int()),
    })
}

// ------------------------------------------------------ combinations ---

/// One term `y · A` of a linear combination.
#[derive(Debug, Clone)]
pub struct LcuTerm {
    pub encoding: BlockEncodingSpec,
    pub coefficient: C64,
}

/// `Σ y_j A_j` with `β ≥ ‖y‖₁`.
#[derive(Debug, Clone)]
pub struct LcuCombination {
    pub terms: Vec<LcuTerm>,
    pub beta: f64,
}

impl LcuCombination {
    pub fn new(terms: Vec<LcuTerm>, beta: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("empty combination".into()));
        }
        let l1: f64 = terms.iter().map(|t| t.coefficient.norm()).sum();
        if l1 > beta * (1.0 + 1e-12) {
            return Err(Error::Config(format!("‖y‖₁ = {l1} exceeds β = {beta}")));
        }
        Ok(Self { terms, beta })
    }

    /// Combination with `β = ‖y‖₁`.
    pub fn tight(terms: Vec<LcuTerm>) -> Result<Self> {
        let l1: f64 = terms.iter().map(|t| t.coefficient.norm()).sum();
        Self::new(terms, l1)
    }
}

fn bits_for(states: usize) -> usize {
    (usize::BITS - (states.max(2) - 1).leading_zeros()) as usize
}

/// Encoding of `Σ c_i A_i / norm` from encodings of `A_i`.
///
/// Selector amplitudes form a state-preparation pair: the right state
/// carries `√|w_i|·e^{i arg w_i}` and the left `√|w_i|`, with any leftover
/// weight on two separate unused selector values.
fn combine(terms: &[(&BlockEncodingSpec, C64)], norm: f64, label: &str) -> Result<BlockEncodingSpec> {
    let first = terms.first().ok_or_else(|| Error::Config("no terms".into()))?.0;
    let sys_width = first.system_qubits()?;
    let phase = first.phase;
    let mut weights = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        if e.system != first.system || e.system_qubits()? != sys_width {
            return Err(Error::Dimension("terms act on different systems".into()));
        }
        weights.push(c * e.alpha * e.phase / (phase * norm));
    }
    let mass: f64 = weights.iter().map(|w| w.norm()).sum();
    if mass > 1.0 + 1e-12 {
        return Err(Error::Config(format!("selector weights sum to {mass} > 1")));
    }
    let leftover = (1.0 - mass).max(0.0);
    let slots = terms.len() + if leftover > 1e-15 { 2 } else { 0 };
    let w_idx = bits_for(slots);

    let mut spec: Vec<(String, usize)> = vec![("idx".to_string(), w_idx)];
    for (e, _) in terms {
        for r in e.circuit.layout.registers() {
            match spec.iter().find(|(n, _)| *n == r.name) {
                Some((_, w)) if *w != r.width => {
                    return Err(Error::Dimension(format!("register `{}` has conflicting widths", r.name)));
                }
                Some(_) => {}
                None => spec.push((r.name.clone(), r.width)),
            }
        }
    }
    // Keep the system register last.
    let sys_pos = spec.iter().position(|(n, _)| *n == first.system).expect("system register");
    let sys_entry = spec.remove(sys_pos);
    spec.push(sys_entry);
    let spec_ref: Vec<(&str, usize)> = spec.iter().map(|(n, w)| (n.as_str(), *w)).collect();
    let layout = RegisterLayout::with_cap(&spec_ref, TALLY_QUBIT_CAP)?;
    let idx = layout.qubits("idx")?;

    let dim = 1usize << w_idx;
    let mut right = vec![ZERO; dim];
    let mut left = vec![ZERO; dim];
    for (i, w) in weights.iter().enumerate() {
        let mag = w.norm().sqrt();
        right[i] = if w.norm() > 0.0 { cis(w.arg()) * mag } else { ZERO };
        left[i] = C64::new(mag, 0.0);
    }
    if slots > terms.len() {
        right[terms.len()] = C64::new(leftover.sqrt(), 0.0);
        left[terms.len() + 1] = C64::new(leftover.sqrt(), 0.0);
    }

    let mut circuit = Circuit::new(layout.clone());
    circuit.push(Op::Load { qubits: idx.clone(), target: Arc::new(right), adjoint: false, controls: vec![] })?;
    let mut scratch = 0;
    for (i, (e, _)) in terms.iter().enumerate() {
        let sub = e.circuit.embed(&layout)?;
        scratch = scratch.max(sub.scratch);
        let ops = sub.controlled(&value_controls(&idx, i as u64)).ops;
        circuit.push(Op::Block { label: e.label.clone(), ops, cost: None })?;
    }
    circuit.push(Op::Load { qubits: idx, target: Arc::new(left), adjoint: true, controls: vec![] })?;
    circuit.scratch = scratch;

    let mut zero: Vec<String> = vec!["idx".into()];
    for (e, _) in terms {
        for z in &e.zero {
            if !zero.contains(z) {
                zero.push(z.clone());
            }
        }
    }
    let epsilon = terms
        .iter()
        .map(|(e, c)| e.epsilon.map(|eps| eps * c.norm()))
        .try_fold(0.0, |acc, x| x.map(|v| acc + v));
    Ok(BlockEncodingSpec { circuit, system: first.system.clone(), zero, alpha: norm, phase, epsilon, label: label.into() })
}

/// Encoding of `(a·A₁ + b·A₂)/(a·α₁ + b·α₂)` for nonnegative weights.
pub fn pair_sum(be1: &BlockEncodingSpec, be2: &BlockEncodingSpec, a: f64, b: f64) -> Result<BlockEncodingSpec> {
    if a < 0.0 || b < 0.0 || !(a + b > 0.0) {
        return Err(Error::Config(format!("pair weights ({a}, {b}) must be nonnegative and not both zero")));
    }
    let norm = a * be1.alpha + b * be2.alpha;
    combine(&[(be1, C64::new(a, 0.0)), (be2, C64::new(b, 0.0))], norm, "pair")
}

/// Encoding of `Σ y_j A_j` with subnormalisation `α β`, `α = max_j α_j`.
pub fn general_combination(terms: &LcuCombination) -> Result<BlockEncodingSpec> {
    let alpha = terms.terms.iter().map(|t| t.encoding.alpha).fold(0.0, f64::max);
    let list: Vec<(&BlockEncodingSpec, C64)> = terms.terms.iter().map(|t| (&t.encoding, t.coefficient)).collect();
    combine(&list, alpha * terms.beta, "combination")
}

/// One-ancilla encoding of `diag(values)/max|values|` via a multiplexed
/// rotation on the ancilla `v`.
pub fn diagonal_encoding(values: &[C64]) -> Result<BlockEncodingSpec> {
    let size = values.len();
    if !size.is_power_of_two() || size < 2 {
        return Err(Error::Dimension(format!("{size} diagonal entries")));
    }
    let alpha = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if alpha == 0.0 {
        return Err(Error::Config("zero diagonal".into()));
    }
    let n = size.trailing_zeros() as usize;
    let layout = RegisterLayout::new(&[("v", 1), (SYSTEM, n)])?;
    let unitaries: Vec<Mat2> = values
        .iter()
        .map(|z| {
            let a = z / alpha;
            let b = C64::new((1.0 - a.norm_sqr()).max(0.0).sqrt(), 0.0);
            [[a, -b.conj()], [b, a.conj()]]
        })
        .collect();
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(Op::Multiplexed {
        select: layout.qubits(SYSTEM)?,
        target: layout.qubit("v", 0)?,
        unitaries: Arc::new(unitaries),
        controls: vec![],
    })?;
    Ok(BlockEncodingSpec {
        circuit,
        system: SYSTEM.into(),
        zero: vec!["v".into()],
        alpha,
        phase: C64::new(1.0, 0.0),
        epsilon: Some(0.0),
        label: "diagonal".into(),
    })
}

/// Point defect `λ δ(x − x₀)` as a diagonal with one nonzero entry.
pub fn point_defect(n: u32, site: usize, strength: f64) -> Result<Vec<C64>> {
    let size = LatticeConfig::new(n)?.size();
    if site >= size {
        return Err(Error::Range(format!("site {site} outside lattice of {size}")));
    }
    let mut v = vec![ZERO; size];
    v[site] = C64::new(strength, 0.0);
    Ok(v)
}

// ------------------------------------------------------------ masking ---

/// Row-dependent cutoffs `c_k ∈ [0, N/2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSpec {
    cutoffs: Vec<u64>,
}

impl MaskSpec {
    pub fn new(cutoffs: Vec<u64>) -> Result<Self> {
        let size = cutoffs.len();
        if !size.is_power_of_two() || size < 4 {
            return Err(Error::Dimension(format!("{size} cutoffs; need a power of two ≥ 4")));
        }
        if let Some((k, c)) = cutoffs.iter().enumerate().find(|(_, &c)| c > size as u64 / 2) {
            return Err(Error::Range(format!("cutoff c_{k} = {c} exceeds N/2")));
        }
        Ok(Self { cutoffs })
    }

    pub fn full(n: u32) -> Result<Self> {
        let size = LatticeConfig::new(n)?.size();
        Self::new(vec![size as u64 / 2; size])
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::new(vec![0; LatticeConfig::new(n)?.size()])
    }

    /// `c_k = k mod (N/2)`.
    pub fn sawtooth(n: u32) -> Result<Self> {
        let size = LatticeConfig::new(n)?.size() as u64;
        Self::new((0..size).map(|k| k % (size / 2)).collect())
    }

    pub fn cutoffs(&self) -> &[u64] {
        &self.cutoffs
    }

    pub fn size(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn keeps(&self, row: usize, j: u64) -> bool {
        j <= self.cutoffs[row]
    }
}

/// Dense `Σ_{j=1}^{N/2−1} c_j M_j (P^j − P^{N−j})` with `(M_j)_kk = [j ≤ c_k]`.
pub fn masked_dense(order: Order, mask: &MaskSpec) -> Result<CMat> {
    let size = mask.size();
    let coeffs = slac::truncated(order, LatticeConfig::from_size(size)?).coeffs;
    let mut m = CMat::zeros(size, size);
    for j in 1..size / 2 {
        for col in 0..size {
            let up = (col + j) % size;
            let down = (col + size - j) % size;
            if mask.keeps(up, j as u64) {
                m[(up, col)] += coeffs[j];
            }
            if mask.keeps(down, j as u64) {
                m[(down, col)] -= coeffs[j];
            }
        }
    }
    Ok(m)
}

/// `α = 2 Σ_{j=1}^{N/2−1} |c_j|` of the masked circuit.
pub fn mask_alpha(order: Order, n: u32) -> Result<f64> {
    let c = slac::truncated(order, LatticeConfig::new(n)?).coeffs;
    Ok(2.0 * (1..c.len() / 2).map(|j| c[j].norm()).sum::<f64>())
}

/// Circuit encoding of the masked operator.
///
/// Registers `(j, d, f, sl, m, sys)`. `KEEP` flips `f` when the destination
/// row keeps index `j`; `sl = d ∧ f` selects subtraction; the marker `m` is
/// raised on the rejected branch.
pub fn masked_encoding(order: Order, mask: &MaskSpec) -> Result<BlockEncodingSpec> {
    let size = mask.size();
    let n = size.trailing_zeros();
    if n < 3 {
        return Err(Error::Config("masked encoding needs n ≥ 3".into()));
    }
    let layout = RegisterLayout::new(&[("j", n as usize - 1), ("d", 1), ("f", 1), ("sl", 1), ("m", 1), (SYSTEM, n as usize)])?;
    let j = layout.qubits("j")?;
    let d = layout.qubit("d", 0)?;
    let f = layout.qubit("f", 0)?;
    let sl = layout.qubit("sl", 0)?;
    let mk = layout.qubit("m", 0)?;
    let sys = layout.qubits(SYSTEM)?;
    let alpha = mask_alpha(order, n)?;
    let coeffs = slac::truncated(order, LatticeConfig::new(n)?).coeffs;

    let mut target = vec![ZERO; 1 << n];
    for jj in 1..size / 2 {
        let amp = C64::new((coeffs[jj].norm() / alpha).sqrt(), 0.0);
        target[jj] = amp;
        target[jj | size / 2] = amp;
    }
    let mut load_q = j.clone();
    load_q.push(d);
    let load = Op::Load { qubits: load_q, target: Arc::new(target), adjoint: false, controls: vec![] };

    let cut = Arc::new(mask.cutoffs().to_vec());
    let sz = size as u64;
    let keep = PredicateFn(Arc::new(move |v: &[u64]| {
        let (jj, dd, k) = (v[0], v[1], v[2]);
        let dest = if dd == 0 { (k + jj) % sz } else { (k + sz - jj) % sz };
        jj >= 1 && jj <= cut[dest as usize]
    }));
    let cmp = crate::qsim::tally_comparator(n as usize);

    let mut c = Circuit::new(layout.clone());
    c.push(load.clone())?;
    c.push(Op::Predicate {
        inputs: vec![j.clone(), vec![d], sys.clone()],
        flag: f,
        func: keep,
        label: "keep".into(),
        cost: cmp,
        controls: vec![],
    })?;
    c.push(Op::ccx(d, f, sl))?;
    for (i, &jq) in j.iter().enumerate() {
        let step = 1u64 << i;
        c.push(Op::add_const(sys.clone(), step).when(vec![ctl(jq), ctl(f), anti(sl)]))?;
        c.push(Op::add_const(sys.clone(), sz - step).when(vec![ctl(jq), ctl(f), ctl(sl)]))?;
    }
    c.push(Op::x(mk).when(vec![anti(f)]))?;
    match order {
        Order::Second => c.append(&sign_oracle(&layout)?)?,
        Order::First => c.append(&phase_oracle(&layout, n)?)?,
    };
    c.push(Op::z(sl))?;
    c.push(Op::ccx(d, f, sl))?;
    c.push(Op::x(f))?;
    c.push(load.adjoint())?;

    Ok(BlockEncodingSpec {
        circuit: c,
        system: SYSTEM.into(),
        zero: ["j", "d", "f", "sl", "m"].iter().map(|s| s.to_string()).collect(),
        alpha,
        phase: C64::new(-1.0, 0.0),
        epsilon: Some(0.0),
        label: format!("masked{}", order.as_int()),
    })
}

/// Dense reference and circuit encoding of the masked operator.
pub fn masked_operator(order: Order, mask: &MaskSpec) -> Result<(CMat, BlockEncodingSpec)> {
    Ok((masked_dense(order, mask)?, masked_encoding(order, mask)?))
}

// ---------------------------------------------------------- reports ---

/// Subnormalisation comparison for one lattice size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRow {
    pub n: u32,
    pub alpha_first: f64,
    pub alpha_second: f64,
    /// `α^(2)/‖Δ̃^(2)‖`.
    pub laplacian_ratio: f64,
    /// Generic pseudo-differential bound `2^{n/2}·sup|symbol|` for the
    /// Laplacian (`sup = π²`).
    pub generic_bound: f64,
}

pub fn normalization_table(ns: &[u32]) -> Result<Vec<NormalizationRow>> {
    ns.iter()
        .map(|&n| {
            let cfg = LatticeConfig::new(n)?;
            let spec = slac::truncated_laplacian(cfg).spectrum();
            let norm = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(NormalizationRow {
                n,
                alpha_first: state_prep::alpha_first_order(n),
                alpha_second: state_prep::alpha_laplacian(),
                laplacian_ratio: state_prep::alpha_laplacian() / norm,
                generic_bound: 2f64.powf(n as f64 / 2.0) * PI * PI,
            })
        })
        .collect()
}

/// `‖α·phase·B − target‖` in operator norm.
pub fn encoding_error(spec: &BlockEncodingSpec, target: &CMat) -> Result<f64> {
    Ok(op_norm(&(spec.encoded()? - target)))
}

/// Largest entry-wise deviation, cheaper than the operator norm.
pub fn encoding_max_error(spec: &BlockEncodingSpec, target: &CMat) -> Result<f64> {
    Ok(max_abs(&(spec.encoded()? - target)))
}

/// Tally of the gate-level encoding without simulating it.
pub fn gate_level_tally(order: Order, n: u32, n_ref: u32) -> Result<GateTally> {
    Ok(slac_circuit(order, n, PrepKind::GateLevel { n_ref })?.tally())
}
