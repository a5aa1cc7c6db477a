//! Register-addressed statevector simulator.
//!
//! Qubit `q` is bit `q` of the amplitude index. Registers are contiguous runs
//! of qubits, little-endian, laid out in declaration order. Circuits are plain
//! data ([`Op`] lists) so they can be inverted, controlled, tallied and
//! simulated independently.
//!
//! Arithmetic blocks (adders, comparators, predicates) act as basis
//! permutations without scratch qubits; their Toffoli costs come from
//! registered closed forms and land in [`GateTally::analytic`].

use crate::linalg::{cis, ONE, ZERO};
use crate::{CMat, Error, Result, C64};
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_QUBIT_CAP: usize = 26;
/// Layout cap for circuits that are only tallied, never simulated.
pub const TALLY_QUBIT_CAP: usize = 128;
/// Hard limit on simulated qubits.
pub const MAX_SIM_QUBITS: usize = 28;

pub type Mat2 = [[C64; 2]; 2];

// ---------------------------------------------------------------- layout ---

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    regs: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    pub fn new(spec: &[(&str, usize)]) -> Result<Self> {
        Self::with_cap(spec, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(spec: &[(&str, usize)], cap: usize) -> Result<Self> {
        let mut regs = Vec::with_capacity(spec.len());
        let mut offset = 0;
        for &(name, width) in spec {
            if width == 0 {
                return Err(Error::Config(format!("register `{name}` has zero width")));
            }
            if regs.iter().any(|r: &Register| r.name == name) {
                return Err(Error::Config(format!("duplicate register `{name}`")));
            }
            regs.push(Register { name: name.to_string(), offset, width });
            offset += width;
        }
        if offset > cap {
            return Err(Error::Config(format!("{offset} qubits exceed the cap of {cap}")));
        }
        Ok(Self { regs, total: offset })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    pub fn has(&self, name: &str) -> bool {
        self.regs.iter().any(|r| r.name == name)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.regs.iter().find(|r| r.name == name).ok_or_else(|| Error::Register(name.into()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.register(name)?.width)
    }

    /// Global qubit indices of a register, least significant first.
    pub fn qubits(&self, name: &str) -> Result<Vec<usize>> {
        let r = self.register(name)?;
        Ok((r.offset..r.offset + r.width).collect())
    }

    pub fn qubit(&self, name: &str, bit: usize) -> Result<usize> {
        let r = self.register(name)?;
        if bit >= r.width {
            return Err(Error::Range(format!("bit {bit} of `{name}` (width {})", r.width)));
        }
        Ok(r.offset + bit)
    }

    /// Basis index with the given register values; unspecified registers are 0.
    pub fn encode(&self, values: &[(&str, u64)]) -> Result<usize> {
        let mut idx = 0usize;
        for &(name, v) in values {
            let r = self.register(name)?;
            if r.width < 64 && v >> r.width != 0 {
                return Err(Error::Range(format!("value {v} does not fit `{name}`")));
            }
            idx |= (v as usize) << r.offset;
        }
        Ok(idx)
    }

    pub fn decode(&self, index: usize, name: &str) -> Result<u64> {
        let r = self.register(name)?;
        Ok(((index >> r.offset) & ((1 << r.width) - 1)) as u64)
    }
}

// ----------------------------------------------------------------- gates ---

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    /// Fires on `|1⟩` when true, on `|0⟩` when false.
    pub on: bool,
}

pub fn ctl(qubit: usize) -> Control {
    Control { qubit, on: true }
}

pub fn anti(qubit: usize) -> Control {
    Control { qubit, on: false }
}

/// Controls on every qubit of a register matching `value`.
pub fn value_controls(qubits: &[usize], value: u64) -> Vec<Control> {
    qubits.iter().enumerate().map(|(k, &q)| Control { qubit: q, on: (value >> k) & 1 == 1 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    /// `exp(−iθY/2)`.
    Ry(f64),
    /// `exp(−iθZ/2)`.
    Rz(f64),
    /// `diag(1, e^{iφ})`.
    Phase(f64),
    Unitary(Mat2),
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    pub fn matrix(&self) -> Mat2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            Gate::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
            Gate::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
            Gate::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Gate::S => [[ONE, ZERO], [ZERO, c(0.0, 1.0)]],
            Gate::Sdg => [[ONE, ZERO], [ZERO, c(0.0, -1.0)]],
            Gate::Ry(t) => {
                let (sn, cs) = (t / 2.0).sin_cos();
                [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
            }
            Gate::Rz(t) => [[cis(-t / 2.0), ZERO], [ZERO, cis(t / 2.0)]],
            Gate::Phase(p) => [[ONE, ZERO], [ZERO, cis(p)]],
            Gate::Unitary(m) => m,
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::S => Gate::Sdg,
            Gate::Sdg => Gate::S,
            Gate::Ry(t) => Gate::Ry(-t),
            Gate::Rz(t) => Gate::Rz(-t),
            Gate::Phase(p) => Gate::Phase(-p),
            Gate::Unitary(m) => Gate::Unitary(mat2_adjoint(&m)),
            g => g,
        }
    }

    fn is_clifford(&self) -> bool {
        matches!(self, Gate::H | Gate::X | Gate::Y | Gate::Z | Gate::S | Gate::Sdg)
    }
}

pub fn mat2_adjoint(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// Boolean function on register values, used as `|x⟩|b⟩ → |x⟩|b ⊕ f(x)⟩`.
#[derive(Clone)]
pub struct PredicateFn(pub Arc<dyn Fn(&[u64]) -> bool + Send + Sync>);

impl fmt::Debug for PredicateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PredicateFn")
    }
}

#[derive(Debug, Clone)]
pub enum Op {
    Gate { gate: Gate, target: usize, controls: Vec<Control> },
    Swap { a: usize, b: usize, controls: Vec<Control> },
    /// DFT with kernel `e^{+2πi·xy/2^w}` (or its inverse) on a qubit list.
    Qft { qubits: Vec<usize>, inverse: bool, controls: Vec<Control> },
    /// `|x⟩ → |x + constant mod 2^w⟩`.
    AddConst { qubits: Vec<usize>, constant: u64, controls: Vec<Control> },
    Predicate {
        inputs: Vec<Vec<usize>>,
        flag: usize,
        func: PredicateFn,
        label: String,
        cost: GateCounts,
        controls: Vec<Control>,
    },
    /// 2×2 unitary on the pair of register values `(a, b)`.
    TwoLevel { qubits: Vec<usize>, a: u64, b: u64, matrix: Mat2, controls: Vec<Control> },
    /// Diagonal phase table indexed by register value.
    Diagonal { qubits: Vec<usize>, phases: Arc<Vec<C64>>, controls: Vec<Control> },
    /// Amplitude-loading oracle mapping `|0⟩` to `target` (a phased
    /// Householder reflection).
    Load { qubits: Vec<usize>, target: Arc<Vec<C64>>, adjoint: bool, controls: Vec<Control> },
    /// Uniformly controlled single-qubit gate: `unitaries[s]` acts on
    /// `target` when the select register holds `s`.
    Multiplexed { select: Vec<usize>, target: usize, unitaries: Arc<Vec<Mat2>>, controls: Vec<Control> },
    /// Named sub-circuit. With `cost` set, the inner gates are not tallied and
    /// the registered cost is booked instead.
    Block { label: String, ops: Vec<Op>, cost: Option<GateCounts> },
}

impl Op {
    pub fn gate(gate: Gate, target: usize) -> Op {
        Op::Gate { gate, target, controls: vec![] }
    }
    pub fn h(q: usize) -> Op {
        Op::gate(Gate::H, q)
    }
    pub fn x(q: usize) -> Op {
        Op::gate(Gate::X, q)
    }
    pub fn z(q: usize) -> Op {
        Op::gate(Gate::Z, q)
    }
    pub fn ry(q: usize, theta: f64) -> Op {
        Op::gate(Gate::Ry(theta), q)
    }
    pub fn phase(q: usize, phi: f64) -> Op {
        Op::gate(Gate::Phase(phi), q)
    }
    pub fn cx(control: usize, target: usize) -> Op {
        Op::x(target).when(vec![ctl(control)])
    }
    pub fn ccx(c1: usize, c2: usize, target: usize) -> Op {
        Op::x(target).when(vec![ctl(c1), ctl(c2)])
    }
    pub fn add_const(qubits: Vec<usize>, constant: u64) -> Op {
        Op::AddConst { qubits, constant, controls: vec![] }
    }

    /// Adds controls to this operation.
    pub fn when(self, extra: Vec<Control>) -> Op {
        let mut op = self;
        op.add_controls(&extra);
        op
    }

    fn add_controls(&mut self, extra: &[Control]) {
        match self {
            Op::Gate { controls, .. }
            | Op::Swap { controls, .. }
            | Op::Qft { controls, .. }
            | Op::AddConst { controls, .. }
            | Op::Predicate { controls, .. }
            | Op::TwoLevel { controls, .. }
            | Op::Diagonal { controls, .. }
            | Op::Load { controls, .. }
            | Op::Multiplexed { controls, .. } => controls.extend_from_slice(extra),
            Op::Block { ops, .. } => ops.iter_mut().for_each(|o| o.add_controls(extra)),
        }
    }

    pub fn adjoint(&self) -> Op {
        match self {
            Op::Gate { gate, target, controls } => {
                Op::Gate { gate: gate.adjoint(), target: *target, controls: controls.clone() }
            }
            Op::Swap { .. } | Op::Predicate { .. } => self.clone(),
            Op::Qft { qubits, inverse, controls } => {
                Op::Qft { qubits: qubits.clone(), inverse: !inverse, controls: controls.clone() }
            }
            Op::AddConst { qubits, constant, controls } => {
                let m = mask(qubits.len());
                Op::AddConst { qubits: qubits.clone(), constant: constant.wrapping_neg() & m, controls: controls.clone() }
            }
            Op::TwoLevel { qubits, a, b, matrix, controls } => Op::TwoLevel {
                qubits: qubits.clone(),
                a: *a,
                b: *b,
                matrix: mat2_adjoint(matrix),
                controls: controls.clone(),
            },
            Op::Diagonal { qubits, phases, controls } => Op::Diagonal {
                qubits: qubits.clone(),
                phases: Arc::new(phases.iter().map(|p| p.conj()).collect()),
                controls: controls.clone(),
            },
            Op::Load { qubits, target, adjoint, controls } => {
                Op::Load { qubits: qubits.clone(), target: target.clone(), adjoint: !adjoint, controls: controls.clone() }
            }
            Op::Multiplexed { select, target, unitaries, controls } => Op::Multiplexed {
                select: select.clone(),
                target: *target,
                unitaries: Arc::new(unitaries.iter().map(mat2_adjoint).collect()),
                controls: controls.clone(),
            },
            Op::Block { label, ops, cost } => {
                Op::Block { label: label.clone(), ops: ops.iter().rev().map(Op::adjoint).collect(), cost: *cost }
            }
        }
    }

    /// Relabels every qubit through `f`.
    pub fn map_qubits(&self, f: &dyn Fn(usize) -> usize) -> Op {
        let mq = |v: &Vec<usize>| v.iter().map(|&q| f(q)).collect::<Vec<_>>();
        let mc = |v: &Vec<Control>| v.iter().map(|c| Control { qubit: f(c.qubit), on: c.on }).collect::<Vec<_>>();
        match self {
            Op::Gate { gate, target, controls } => Op::Gate { gate: *gate, target: f(*target), controls: mc(controls) },
            Op::Swap { a, b, controls } => Op::Swap { a: f(*a), b: f(*b), controls: mc(controls) },
            Op::Qft { qubits, inverse, controls } => Op::Qft { qubits: mq(qubits), inverse: *inverse, controls: mc(controls) },
            Op::AddConst { qubits, constant, controls } => {
                Op::AddConst { qubits: mq(qubits), constant: *constant, controls: mc(controls) }
            }
            Op::Predicate { inputs, flag, func, label, cost, controls } => Op::Predicate {
                inputs: inputs.iter().map(mq).collect(),
                flag: f(*flag),
                func: func.clone(),
                label: label.clone(),
                cost: *cost,
                controls: mc(controls),
            },
            Op::TwoLevel { qubits, a, b, matrix, controls } => {
                Op::TwoLevel { qubits: mq(qubits), a: *a, b: *b, matrix: *matrix, controls: mc(controls) }
            }
            Op::Diagonal { qubits, phases, controls } => {
                Op::Diagonal { qubits: mq(qubits), phases: phases.clone(), controls: mc(controls) }
            }
            Op::Load { qubits, target, adjoint, controls } => {
                Op::Load { qubits: mq(qubits), target: target.clone(), adjoint: *adjoint, controls: mc(controls) }
            }
            Op::Multiplexed { select, target, unitaries, controls } => Op::Multiplexed {
                select: mq(select),
                target: f(*target),
                unitaries: unitaries.clone(),
                controls: mc(controls),
            },
            Op::Block { label, ops, cost } => {
                Op::Block { label: label.clone(), ops: ops.iter().map(|o| o.map_qubits(f)).collect(), cost: *cost }
            }
        }
    }

    fn controls(&self) -> &[Control] {
        match self {
            Op::Gate { controls, .. }
            | Op::Swap { controls, .. }
            | Op::Qft { controls, .. }
            | Op::AddConst { controls, .. }
            | Op::Predicate { controls, .. }
            | Op::TwoLevel { controls, .. }
            | Op::Diagonal { controls, .. }
            | Op::Load { controls, .. }
            | Op::Multiplexed { controls, .. } => controls,
            Op::Block { .. } => &[],
        }
    }

    fn targets(&self) -> Vec<usize> {
        match self {
            Op::Gate { target, .. } => vec![*target],
            Op::Swap { a, b, .. } => vec![*a, *b],
            Op::Qft { qubits, .. }
            | Op::AddConst { qubits, .. }
            | Op::TwoLevel { qubits, .. }
            | Op::Diagonal { qubits, .. }
            | Op::Load { qubits, .. } => qubits.clone(),
            Op::Predicate { inputs, flag, .. } => {
                let mut v: Vec<usize> = inputs.iter().flatten().copied().collect();
                v.push(*flag);
                v
            }
            Op::Multiplexed { select, target, .. } => {
                let mut v = select.clone();
                v.push(*target);
                v
            }
            Op::Block { .. } => vec![],
        }
    }

    fn validate(&self, total: usize) -> Result<()> {
        if let Op::Block { ops, .. } = self {
            return ops.iter().try_for_each(|o| o.validate(total));
        }
        let t = self.targets();
        let cs: Vec<usize> = self.controls().iter().map(|c| c.qubit).collect();
        let mut seen = vec![false; total];
        for &q in t.iter().chain(&cs) {
            if q >= total {
                return Err(Error::Range(format!("qubit {q} outside a {total}-qubit layout")));
            }
            if seen[q] {
                return Err(Error::Config(format!("qubit {q} used twice in one operation")));
            }
            seen[q] = true;
        }
        match self {
            Op::TwoLevel { qubits, a, b, .. } => {
                if a == b || a >> qubits.len() != 0 || b >> qubits.len() != 0 {
                    return Err(Error::Config("two-level indices invalid".into()));
                }
            }
            Op::Diagonal { qubits, phases, .. } if phases.len() != 1 << qubits.len() => {
                return Err(Error::Dimension("diagonal table length".into()));
            }
            Op::Load { qubits, target, .. } => {
                if target.len() != 1 << qubits.len() {
                    return Err(Error::Dimension("load target length".into()));
                }
                let nrm: f64 = target.iter().map(|z| z.norm_sqr()).sum();
                if (nrm - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!("load target norm² {nrm} ≠ 1")));
                }
            }
            Op::Multiplexed { select, unitaries, .. } if unitaries.len() != 1 << select.len() => {
                return Err(Error::Dimension("multiplexor table length".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

fn mask(w: usize) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

// ----------------------------------------------------------------- tally ---

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub toffoli: u64,
    pub cx: u64,
    pub clifford: u64,
    pub rotation: u64,
    pub qft_calls: u64,
}

impl GateCounts {
    pub fn total(&self) -> u64 {
        self.toffoli + self.cx + self.clifford + self.rotation
    }
}

impl std::ops::Add for GateCounts {
    type Output = GateCounts;
    fn add(self, o: GateCounts) -> GateCounts {
        GateCounts {
            toffoli: self.toffoli + o.toffoli,
            cx: self.cx + o.cx,
            clifford: self.clifford + o.clifford,
            rotation: self.rotation + o.rotation,
            qft_calls: self.qft_calls + o.qft_calls,
        }
    }
}

impl std::ops::AddAssign for GateCounts {
    fn add_assign(&mut self, o: GateCounts) {
        *self = *self + o;
    }
}

/// Gate counts of a circuit. `gates` are elementary gates present in the
/// circuit (multi-controls expanded by an AND ladder); `analytic` holds the
/// registered closed-form costs of emulated blocks; `calls` counts named
/// sub-circuits and oracle loads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateTally {
    pub gates: GateCounts,
    pub analytic: GateCounts,
    pub ancillas: u64,
    pub calls: BTreeMap<String, u64>,
}

impl GateTally {
    pub fn total(&self) -> u64 {
        self.gates.total() + self.analytic.total()
    }

    pub fn toffoli(&self) -> u64 {
        self.gates.toffoli + self.analytic.toffoli
    }

    pub fn calls(&self, label: &str) -> u64 {
        self.calls.get(label).copied().unwrap_or(0)
    }

    fn call(&mut self, label: &str) {
        *self.calls.entry(label.to_string()).or_insert(0) += 1;
    }
}

/// Toffolis to reduce `c ≥ 2` controls to one qubit and back.
fn ladder(c: usize) -> u64 {
    if c >= 2 {
        2 * (c as u64 - 1)
    } else {
        0
    }
}

/// Elementary cost of a single-qubit gate under `c` controls.
pub fn gate_cost(gate: &Gate, c: usize) -> GateCounts {
    let mut g = GateCounts::default();
    match (gate, c) {
        (g0, 0) if g0.is_clifford() => g.clifford = 1,
        (Gate::Unitary(_), 0) => g.rotation = 3,
        (_, 0) => g.rotation = 1,
        (Gate::X, 1) => g.cx = 1,
        (Gate::X, _) => g.toffoli = 2 * c as u64 - 3,
        (Gate::Y | Gate::Z, 1) => {
            g.cx = 1;
            g.clifford = 2;
        }
        (Gate::Y | Gate::Z, _) => {
            g.toffoli = 2 * c as u64 - 3;
            g.clifford = 2;
        }
        (Gate::H, _) => g.toffoli = 1 + ladder(c),
        (Gate::Ry(_), _) => {
            g.rotation = 2;
            g.cx = 2;
            g.toffoli = ladder(c);
        }
        (Gate::Unitary(_), _) => {
            g.rotation = 4;
            g.cx = 2;
            g.toffoli = ladder(c);
        }
        (Gate::S | Gate::Sdg | Gate::Phase(_) | Gate::Rz(_), _) => {
            g.rotation = 3;
            g.cx = 2;
            g.toffoli = ladder(c);
        }
    }
    g
}

/// Registered cost of the ripple-carry constant adder on `w` bits with `c`
/// controls: constant loaded into scratch, Cuccaro MAJ/UMA chain, unloaded.
pub fn tally_const_adder(w: usize, constant: u64, c: usize) -> GateCounts {
    let pop = (constant & mask(w)).count_ones() as u64;
    let w = w as u64;
    let mut g = GateCounts::default();
    if w == 1 {
        g.cx = 1;
    } else {
        g.toffoli = 2 * (w - 1);
        g.cx = 4 * (w - 1) + 2;
    }
    if c == 0 {
        g.clifford += 2 * pop;
    } else {
        g.cx += 2 * pop;
        g.toffoli += ladder(c);
    }
    g
}

/// Registered cost of the ripple-carry comparator `flag ^= [a < b]` on two
/// `w`-bit registers.
pub fn tally_comparator(w: usize) -> GateCounts {
    let w = w as u64;
    GateCounts { toffoli: 2 * w, cx: 4 * w + 1, clifford: 2 * w, rotation: 0, qft_calls: 0 }
}

fn qft_cost(w: usize) -> GateCounts {
    let w = w as u64;
    GateCounts {
        toffoli: 0,
        cx: w * (w - 1) + 3 * (w / 2),
        clifford: w,
        rotation: 3 * w * (w - 1) / 2,
        qft_calls: 1,
    }
}

fn accumulate(op: &Op, t: &mut GateTally) {
    let nc = op.controls().len();
    match op {
        Op::Gate { gate, .. } => t.gates += gate_cost(gate, nc),
        Op::Swap { .. } => {
            t.gates += match nc {
                0 => GateCounts { cx: 3, ..Default::default() },
                _ => GateCounts { toffoli: 1 + ladder(nc), cx: 2, ..Default::default() },
            }
        }
        Op::Qft { qubits, .. } => {
            t.gates.qft_calls += 1;
            let mut g = qft_cost(qubits.len());
            g.qft_calls = 0;
            g.toffoli += 2 * nc as u64;
            t.analytic += g;
        }
        Op::AddConst { qubits, constant, .. } => t.analytic += tally_const_adder(qubits.len(), *constant, nc),
        Op::Predicate { cost, label, .. } => {
            t.analytic += *cost;
            t.analytic.toffoli += 2 * nc as u64;
            t.call(label);
        }
        Op::TwoLevel { qubits, .. } => {
            let w = qubits.len();
            t.analytic += GateCounts {
                toffoli: ladder(w - 1 + nc),
                cx: 2 * (w as u64 - 1) + 2,
                rotation: 4,
                ..Default::default()
            };
        }
        Op::Diagonal { qubits, .. } => {
            let d = 1u64 << qubits.len();
            t.analytic += GateCounts { toffoli: 2 * nc as u64, cx: d, rotation: d, ..Default::default() };
        }
        Op::Load { .. } => t.call("load"),
        Op::Multiplexed { select, .. } => {
            let d = 1u64 << select.len();
            t.analytic += GateCounts { toffoli: 2 * nc as u64, cx: 2 * d, rotation: 3 * d, ..Default::default() };
        }
        Op::Block { label, ops, cost } => {
            t.call(label);
            match cost {
                Some(c) => t.analytic += *c,
                None => ops.iter().for_each(|o| accumulate(o, t)),
            }
        }
    }
}

// --------------------------------------------------------------- circuit ---

#[derive(Debug, Clone)]
pub struct Circuit {
    pub layout: RegisterLayout,
    pub ops: Vec<Op>,
    /// Scratch qubits assumed by the registered arithmetic costs.
    pub scratch: u64,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self { layout, ops: Vec::new(), scratch: 0 }
    }

    pub fn push(&mut self, op: Op) -> Result<&mut Self> {
        op.validate(self.layout.total())?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Op>>(&mut self, ops: I) -> Result<&mut Self> {
        for op in ops {
            self.push(op)?;
        }
        Ok(self)
    }

    /// Appends another circuit over the same layout.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.layout != self.layout {
            return Err(Error::Dimension("circuits have different layouts".into()));
        }
        self.ops.extend(other.ops.iter().cloned());
        self.scratch = self.scratch.max(other.scratch);
        Ok(self)
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            layout: self.layout.clone(),
            ops: self.ops.iter().rev().map(Op::adjoint).collect(),
            scratch: self.scratch,
        }
    }

    /// The same circuit with extra controls on every operation.
    pub fn controlled(&self, controls: &[Control]) -> Circuit {
        Circuit {
            layout: self.layout.clone(),
            ops: self.ops.iter().cloned().map(|o| o.when(controls.to_vec())).collect(),
            scratch: self.scratch,
        }
    }

    /// Re-expresses the circuit on a larger layout that contains every
    /// register of this one (matched by name and width).
    pub fn embed(&self, target: &RegisterLayout) -> Result<Circuit> {
        let mut map = vec![usize::MAX; self.layout.total()];
        for r in self.layout.registers() {
            let t = target.register(&r.name)?;
            if t.width != r.width {
                return Err(Error::Dimension(format!("register `{}` width {} vs {}", r.name, r.width, t.width)));
            }
            for k in 0..r.width {
                map[r.offset + k] = t.offset + k;
            }
        }
        let ops = self.ops.iter().map(|o| o.map_qubits(&|q| map[q])).collect();
        Ok(Circuit { layout: target.clone(), ops, scratch: self.scratch })
    }

    /// Wraps all operations into a single named block.
    pub fn into_block(self, label: &str, cost: Option<GateCounts>) -> Op {
        Op::Block { label: label.to_string(), ops: self.ops, cost }
    }

    pub fn tally(&self) -> GateTally {
        let mut t = GateTally { ancillas: self.scratch, ..Default::default() };
        self.ops.iter().for_each(|o| accumulate(o, &mut t));
        t
    }
}

// ----------------------------------------------------------- statevector ---

#[derive(Debug, Clone)]
enum Bits {
    Contiguous { shift: usize, mask: usize },
    Scattered(Vec<usize>),
}

impl Bits {
    fn new(qubits: &[usize]) -> Bits {
        let contiguous = qubits.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous && !qubits.is_empty() {
            Bits::Contiguous { shift: qubits[0], mask: (1usize << qubits.len()) - 1 }
        } else {
            Bits::Scattered(qubits.to_vec())
        }
    }

    #[inline]
    fn extract(&self, i: usize) -> u64 {
        match self {
            Bits::Contiguous { shift, mask } => ((i >> shift) & mask) as u64,
            Bits::Scattered(q) => q.iter().enumerate().fold(0, |v, (k, &b)| v | ((((i >> b) & 1) as u64) << k)),
        }
    }
}

fn deposit(v: u64, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((((v >> k) & 1) as usize) << q))
}

fn control_mask(controls: &[Control]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(m, v), c| (m | 1 << c.qubit, if c.on { v | 1 << c.qubit } else { v }))
}

fn reg_mask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | 1 << q)
}

/// Result of projecting some registers onto fixed values.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Registers left free, in layout order.
    pub remaining: Vec<String>,
    /// Unnormalised component on the remaining registers (packed little-endian
    /// in layout order); empty when the probability is zero.
    pub residual: Vec<C64>,
}

impl Projection {
    pub fn normalized(&self) -> Option<Vec<C64>> {
        if self.probability <= 0.0 {
            return None;
        }
        let s = 1.0 / self.probability.sqrt();
        Some(self.residual.iter().map(|z| z * s).collect())
    }
}

#[derive(Debug, Clone)]
pub struct Statevector {
    amps: Vec<C64>,
    layout: RegisterLayout,
}

impl Statevector {
    pub fn new(layout: RegisterLayout) -> Result<Self> {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if layout.total() > MAX_SIM_QUBITS {
            return Err(Error::Config(format!("{} qubits exceed the simulation limit {MAX_SIM_QUBITS}", layout.total())));
        }
        if index >> layout.total() != 0 {
            return Err(Error::Range(format!("basis index {index} outside the layout")));
        }
        let mut amps = vec![ZERO; 1 << layout.total()];
        amps[index] = ONE;
        Ok(Self { amps, layout })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << layout.total() {
            return Err(Error::Dimension(format!("{} amplitudes for {} qubits", amps.len(), layout.total())));
        }
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.layout != self.layout {
            return Err(Error::Dimension("circuit and state layouts differ".into()));
        }
        circuit.ops.iter().try_for_each(|op| self.apply(op))
    }

    pub fn apply(&mut self, op: &Op) -> Result<()> {
        op.validate(self.layout.total())?;
        self.apply_unchecked(op);
        Ok(())
    }

    fn apply_unchecked(&mut self, op: &Op) {
        let (cm, cv) = control_mask(op.controls());
        match op {
            Op::Gate { gate, target, .. } => self.apply_1q(&gate.matrix(), *target, cm, cv),
            Op::Swap { a, b, .. } => {
                let (ba, bb) = (1 << a, 1 << b);
                for i in 0..self.amps.len() {
                    if i & ba != 0 && i & bb == 0 && i & cm == cv {
                        self.amps.swap(i, i ^ ba ^ bb);
                    }
                }
            }
            Op::Qft { qubits, inverse, .. } => self.apply_qft(qubits, *inverse, cm, cv),
            Op::AddConst { qubits, constant, .. } => {
                let m = mask(qubits.len());
                let c = constant & m;
                if c != 0 {
                    self.permute_fibers(qubits, cm, cv, |v| (v + c) & m);
                }
            }
            Op::Predicate { inputs, flag, func, .. } => {
                let bits: Vec<Bits> = inputs.iter().map(|q| Bits::new(q)).collect();
                let fb = 1 << flag;
                let mut vals = vec![0u64; bits.len()];
                for i in 0..self.amps.len() {
                    if i & fb == 0 && i & cm == cv {
                        for (v, b) in vals.iter_mut().zip(&bits) {
                            *v = b.extract(i);
                        }
                        if (func.0)(&vals) {
                            self.amps.swap(i, i | fb);
                        }
                    }
                }
            }
            Op::TwoLevel { qubits, a, b, matrix, .. } => {
                let (oa, ob) = (deposit(*a, qubits), deposit(*b, qubits));
                self.for_bases(qubits, cm, cv, |amps, base| {
                    let (x, y) = (amps[base + oa], amps[base + ob]);
                    amps[base + oa] = matrix[0][0] * x + matrix[0][1] * y;
                    amps[base + ob] = matrix[1][0] * x + matrix[1][1] * y;
                });
            }
            Op::Diagonal { qubits, phases, .. } => {
                let bits = Bits::new(qubits);
                for i in 0..self.amps.len() {
                    if i & cm == cv {
                        self.amps[i] *= phases[bits.extract(i) as usize];
                    }
                }
            }
            Op::Load { qubits, target, adjoint, .. } => self.apply_load(qubits, target, *adjoint, cm, cv),
            Op::Multiplexed { select, target, unitaries, .. } => {
                let bits = Bits::new(select);
                let tb = 1 << target;
                for i in 0..self.amps.len() {
                    if i & tb == 0 && i & cm == cv {
                        let u = &unitaries[bits.extract(i) as usize];
                        let (x, y) = (self.amps[i], self.amps[i | tb]);
                        self.amps[i] = u[0][0] * x + u[0][1] * y;
                        self.amps[i | tb] = u[1][0] * x + u[1][1] * y;
                    }
                }
            }
            Op::Block { ops, .. } => ops.iter().for_each(|o| self.apply_unchecked(o)),
        }
    }

    fn apply_1q(&mut self, m: &Mat2, target: usize, cm: usize, cv: usize) {
        let tb = 1usize << target;
        let len = self.amps.len();
        let mut hi = 0;
        while hi < len {
            for i in hi..hi + tb {
                if i & cm == cv {
                    let (x, y) = (self.amps[i], self.amps[i | tb]);
                    self.amps[i] = m[0][0] * x + m[0][1] * y;
                    self.amps[i | tb] = m[1][0] * x + m[1][1] * y;
                }
            }
            hi += 2 * tb;
        }
    }

    fn for_bases(&mut self, qubits: &[usize], cm: usize, cv: usize, mut f: impl FnMut(&mut [C64], usize)) {
        let rm = reg_mask(qubits);
        for base in 0..self.amps.len() {
            if base & rm == 0 && base & cm == cv {
                f(&mut self.amps, base);
            }
        }
    }

    fn permute_fibers(&mut self, qubits: &[usize], cm: usize, cv: usize, map: impl Fn(u64) -> u64) {
        let d = 1usize << qubits.len();
        let offs: Vec<usize> = (0..d as u64).map(|v| deposit(v, qubits)).collect();
        let dest: Vec<usize> = (0..d as u64).map(|v| offs[map(v) as usize]).collect();
        let mut buf = vec![ZERO; d];
        self.for_bases(qubits, cm, cv, |amps, base| {
            for v in 0..d {
                buf[v] = amps[base + offs[v]];
            }
            for v in 0..d {
                amps[base + dest[v]] = buf[v];
            }
        });
    }

    fn apply_qft(&mut self, qubits: &[usize], inverse: bool, cm: usize, cv: usize) {
        let d = 1usize << qubits.len();
        let offs: Vec<usize> = (0..d as u64).map(|v| deposit(v, qubits)).collect();
        let mut planner = FftPlanner::<f64>::new();
        // rustfft's inverse transform carries the e^{+2πi} kernel.
        let fft = if inverse { planner.plan_fft_forward(d) } else { planner.plan_fft_inverse(d) };
        let s = 1.0 / (d as f64).sqrt();
        let mut buf = vec![ZERO; d];
        self.for_bases(qubits, cm, cv, |amps, base| {
            for v in 0..d {
                buf[v] = amps[base + offs[v]];
            }
            fft.process(&mut buf);
            for v in 0..d {
                amps[base + offs[v]] = buf[v] * s;
            }
        });
    }

    fn apply_load(&mut self, qubits: &[usize], target: &[C64], adjoint: bool, cm: usize, cv: usize) {
        let nrm: f64 = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let t0 = target[0] / nrm;
        let phi = if t0.norm() > 0.0 { t0.arg() } else { 0.0 };
        let rot = cis(-phi);
        let tp: Vec<C64> = target.iter().map(|z| z * rot / nrm).collect();
        // w ∝ e0 − t'; ‖e0 − t'‖² = 2(1 − t'_0)
        let den = (2.0 * (1.0 - tp[0].re)).max(0.0).sqrt();
        let global = if adjoint { cis(-phi) } else { cis(phi) };
        let support: Vec<(usize, C64)> = if den < 1e-15 {
            Vec::new()
        } else {
            tp.iter()
                .enumerate()
                .filter_map(|(v, &z)| {
                    let e = if v == 0 { ONE } else { ZERO };
                    let wv = (e - z) / den;
                    (wv.norm() > 0.0).then(|| (deposit(v as u64, qubits), wv))
                })
                .collect()
        };
        let d = 1usize << qubits.len();
        let offs: Vec<usize> = (0..d as u64).map(|v| deposit(v, qubits)).collect();
        let with_phase = phi != 0.0;
        self.for_bases(qubits, cm, cv, |amps, base| {
            let ip: C64 = support.iter().map(|(o, w)| w.conj() * amps[base + o]).sum();
            if ip.norm() > 0.0 {
                for (o, w) in &support {
                    amps[base + o] -= w * ip * 2.0;
                }
            }
            if with_phase {
                for o in &offs {
                    amps[base + o] *= global;
                }
            }
        });
    }

    /// Projects the listed registers onto the given values.
    pub fn project_and_extract(&self, assignment: &[(&str, u64)]) -> Result<Projection> {
        let mut fixed_mask = 0usize;
        let mut fixed_val = 0usize;
        for &(name, v) in assignment {
            let r = self.layout.register(name)?;
            if v >> r.width != 0 {
                return Err(Error::Range(format!("value {v} does not fit `{name}`")));
            }
            fixed_mask |= ((1usize << r.width) - 1) << r.offset;
            fixed_val |= (v as usize) << r.offset;
        }
        let free: Vec<usize> = (0..self.layout.total()).filter(|q| fixed_mask >> q & 1 == 0).collect();
        let remaining: Vec<String> = self
            .layout
            .registers()
            .iter()
            .filter(|r| !assignment.iter().any(|(n, _)| *n == r.name))
            .map(|r| r.name.clone())
            .collect();
        let mut residual = vec![ZERO; 1 << free.len()];
        let mut prob = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & fixed_mask == fixed_val {
                let packed = free.iter().enumerate().fold(0usize, |acc, (k, &q)| acc | ((i >> q) & 1) << k);
                residual[packed] = *a;
                prob += a.norm_sqr();
            }
        }
        if prob == 0.0 {
            residual.clear();
        }
        Ok(Projection { probability: prob, remaining, residual })
    }

    /// Marginal probability of each value of one register.
    pub fn register_distribution(&self, name: &str) -> Result<Vec<f64>> {
        let r = self.layout.register(name)?;
        let mut p = vec![0.0; 1 << r.width];
        for (i, a) in self.amps.iter().enumerate() {
            p[(i >> r.offset) & ((1 << r.width) - 1)] += a.norm_sqr();
        }
        Ok(p)
    }
}

/// Worker count from `SLACQ_WORKERS` (default 1).
pub fn workers() -> usize {
    std::env::var("SLACQ_WORKERS").ok().and_then(|s| s.parse().ok()).filter(|&w| w > 0).unwrap_or(1)
}

/// Order-preserving parallel map over `0..n` using scoped threads.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let w = workers().min(n.max(1));
    if w <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(w);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> =
            (0..w).map(|k| s.spawn(move || (k * chunk..((k + 1) * chunk).min(n)).map(f).collect::<Vec<T>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// `(⟨0|_anc ⊗ I) U (|0⟩_anc ⊗ I)` restricted to `system`, assembled column by
/// column. Registers in `zero` are projected onto 0; every other non-system
/// register must also be listed.
pub fn extract_block(circuit: &Circuit, system: &str, zero: &[&str]) -> Result<CMat> {
    let layout = &circuit.layout;
    let sys = layout.register(system)?.clone();
    for r in layout.registers() {
        if r.name != system && !zero.contains(&r.name.as_str()) {
            return Err(Error::Config(format!("register `{}` neither system nor projected", r.name)));
        }
    }
    let dim = 1usize << sys.width;
    let assign: Vec<(&str, u64)> = zero.iter().map(|&z| (z, 0)).collect();
    let cols = par_map(dim, |col| -> Result<Vec<C64>> {
        let mut sv = Statevector::basis(layout.clone(), col << sys.offset)?;
        sv.run(circuit)?;
        let p = sv.project_and_extract(&assign)?;
        Ok(if p.residual.is_empty() { vec![ZERO; dim] } else { p.residual })
    });
    let mut m = CMat::zeros(dim, dim);
    for (col, v) in cols.into_iter().enumerate() {
        let v = v?;
        for (row, z) in v.into_iter().enumerate() {
            m[(row, col)] = z;
        }
    }
    Ok(m)
}

/// Dense unitary of a circuit acting on a single-register layout.
pub fn circuit_matrix(circuit: &Circuit) -> Result<CMat> {
    let d = 1usize << circuit.layout.total();
    let mut m = CMat::zeros(d, d);
    for col in 0..d {
        let mut sv = Statevector::basis(circuit.layout.clone(), col)?;
        sv.run(circuit)?;
        for (row, z) in sv.amps.iter().enumerate() {
            m[(row, col)] = *z;
        }
    }
    Ok(m)
}

/// Explicit Toffoli/CX decompositions of small arithmetic blocks, used to
/// cross-check the registered costs and the basis-function emulation.
pub mod decompose {
    use super::*;

    fn maj(x: usize, y: usize, z: usize) -> [Op; 3] {
        [Op::cx(z, y), Op::cx(z, x), Op::ccx(x, y, z)]
    }

    fn maj_inv(x: usize, y: usize, z: usize) -> [Op; 3] {
        [Op::ccx(x, y, z), Op::cx(z, x), Op::cx(z, y)]
    }

    fn uma(x: usize, y: usize, z: usize) -> [Op; 3] {
        [Op::ccx(x, y, z), Op::cx(z, x), Op::cx(x, y)]
    }

    /// Layout `(ctrl?, b[w], a[w], c0)`: adds `constant` to `b` modulo `2^w`,
    /// using `a` as constant scratch and `c0` as the carry-in ancilla.
    pub fn const_adder(w: usize, constant: u64, controlled: bool) -> Result<Circuit> {
        let mut spec = vec![];
        if controlled {
            spec.push(("ctrl", 1));
        }
        spec.extend([("b", w), ("a", w), ("c0", 1)]);
        let layout = RegisterLayout::new(&spec)?;
        let b = layout.qubits("b")?;
        let a = layout.qubits("a")?;
        let c0 = layout.qubit("c0", 0)?;
        let ctrl = if controlled { Some(layout.qubit("ctrl", 0)?) } else { None };
        let mut circ = Circuit::new(layout);
        let load: Vec<Op> = (0..w)
            .filter(|k| constant >> k & 1 == 1)
            .map(|k| match ctrl {
                Some(cq) => Op::cx(cq, a[k]),
                None => Op::x(a[k]),
            })
            .collect();
        circ.extend(load.clone())?;
        if w == 1 {
            circ.push(Op::cx(a[0], b[0]))?;
        } else {
            for i in 0..w - 1 {
                let x = if i == 0 { c0 } else { a[i - 1] };
                circ.extend(maj(x, b[i], a[i]))?;
            }
            circ.push(Op::cx(a[w - 1], b[w - 1]))?;
            circ.push(Op::cx(a[w - 2], b[w - 1]))?;
            for i in (0..w - 1).rev() {
                let x = if i == 0 { c0 } else { a[i - 1] };
                circ.extend(uma(x, b[i], a[i]))?;
            }
        }
        circ.extend(load)?;
        Ok(circ)
    }

    /// Layout `(a[w], b[w], c0, flag)`: `flag ^= [a < b]`.
    pub fn comparator(w: usize) -> Result<Circuit> {
        let layout = RegisterLayout::new(&[("a", w), ("b", w), ("c0", 1), ("flag", 1)])?;
        let a = layout.qubits("a")?;
        let b = layout.qubits("b")?;
        let c0 = layout.qubit("c0", 0)?;
        let flag = layout.qubit("flag", 0)?;
        let mut circ = Circuit::new(layout);
        circ.extend(a.iter().map(|&q| Op::x(q)))?;
        for i in 0..w {
            let x = if i == 0 { c0 } else { a[i - 1] };
            circ.extend(maj(x, b[i], a[i]))?;
        }
        circ.push(Op::cx(a[w - 1], flag))?;
        for i in (0..w).rev() {
            let x = if i == 0 { c0 } else { a[i - 1] };
            circ.extend(maj_inv(x, b[i], a[i]))?;
        }
        circ.extend(a.iter().map(|&q| Op::x(q)))?;
        Ok(circ)
    }
}
