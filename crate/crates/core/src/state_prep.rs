//! Nested-box inequality-test state preparation.
//!
//! PREP loads amplitudes proportional to `√|c_j|` of the truncated SLAC
//! coefficients. Indices `j ∈ [1, N/2)` are grouped into dyadic boxes
//! `B_μ = [2^μ, 2^{μ+1})`. A rotation cascade selects a box, Hadamards spread
//! `j` uniformly over it, and a comparison against a uniform reference value
//! `m ∈ [0, M)` accepts with probability `≈ 2^{2μ}/j²` (order 2) or `≈ 2^μ/j`
//! (order 1). Rejected branches are marked by the flag `f = 1`.
//!
//! Register order is `(μ, j, d, a, ref, f)`; order 1 has no `a`.

use crate::linalg::ZERO;
use crate::qsim::{
    anti, ctl, Circuit, GateCounts, GateTally, Op, PredicateFn, RegisterLayout, Statevector, DEFAULT_QUBIT_CAP,
};
use crate::slac::{LatticeConfig, Order};
use crate::{Error, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest supported reference width.
pub const MAX_REF_QUBITS: u32 = 24;

/// `θ_ini` with `tan θ_ini = √(24/π²)`, so `cos² θ_ini = π²/(π²+24)`.
pub fn theta_ini() -> f64 {
    (24.0 / (PI * PI)).sqrt().atan()
}

/// `α^(2) = (π² + 24)/3`.
pub fn alpha_laplacian() -> f64 {
    (PI * PI + 24.0) / 3.0
}

/// `α^(1) = 2(n − 1)`.
pub fn alpha_first_order(n: u32) -> f64 {
    2.0 * (n as f64 - 1.0)
}

pub fn alpha(order: Order, n: u32) -> f64 {
    match order {
        Order::First => alpha_first_order(n),
        Order::Second => alpha_laplacian(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrepConfig {
    n: u32,
    n_ref: u32,
    order: Order,
}

impl PrepConfig {
    pub fn new(n: u32, n_ref: u32, order: Order) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("nested boxes need n ≥ 3, got n={n}")));
        }
        LatticeConfig::new(n)?;
        if !(2..=MAX_REF_QUBITS).contains(&n_ref) {
            return Err(Error::Config(format!("reference width {n_ref} must lie in 2..={MAX_REF_QUBITS}")));
        }
        Ok(Self { n, n_ref, order })
    }

    /// Reference width defaulting to `n` (`M = N`).
    pub fn with_default_ref(n: u32, order: Order) -> Result<Self> {
        Self::new(n, n.max(2), order)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_ref(&self) -> u32 {
        self.n_ref
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// `M = 2^{n_ref}`.
    pub fn m_ref(&self) -> u64 {
        1u64 << self.n_ref
    }

    pub fn size(&self) -> usize {
        1usize << self.n
    }

    /// Number of boxes, `n − 1`.
    pub fn boxes(&self) -> u32 {
        self.n - 1
    }

    /// Cascade angle `θ_k` for `k ∈ [0, n−2)`.
    pub fn theta_k(&self, k: u32) -> Result<f64> {
        if k + 2 > self.n {
            return Err(Error::Range(format!("rotation index {k} for n={}", self.n)));
        }
        let r = (self.n - 1 - k) as i32;
        let c = match self.order {
            Order::Second => 1.0 / (2.0 * (1.0 - 2f64.powi(-r))).sqrt(),
            Order::First => 1.0 / (r as f64).sqrt(),
        };
        Ok(2.0 * c.acos())
    }

    /// Probability that the cascade selects box `μ` (given `a = 1` for order 2).
    pub fn box_probability(&self, mu: u32) -> f64 {
        let b = self.boxes() as i32;
        match self.order {
            Order::Second => 2f64.powi(-(mu as i32)) / (2.0 * (1.0 - 2f64.powi(-b))),
            Order::First => 1.0 / b as f64,
        }
    }
}

/// Dyadic box index: the unique `μ` with `2^μ ≤ j < 2^{μ+1}`.
pub fn box_of(j: u64) -> Result<u32> {
    if j == 0 {
        return Err(Error::Range("j = 0 lies in no box".into()));
    }
    Ok(63 - j.leading_zeros())
}

/// The strict inequality tested against reference value `m`.
pub fn inequality_holds(mu: u32, j: u64, m: u64, m_ref: u64, order: Order) -> bool {
    let (lhs, rhs) = match order {
        Order::Second => ((1u128 << (2 * mu)) * m_ref as u128, m as u128 * (j as u128) * (j as u128)),
        Order::First => ((1u128 << mu) * m_ref as u128, m as u128 * j as u128),
    };
    lhs > rhs
}

/// Number of reference values `m ∈ [0, M)` passing the inequality:
/// `min(M, ⌈2^{2μ}M/j²⌉)` or `min(M, ⌈2^μ M/j⌉)`.
pub fn accept_count(mu: u32, j: u64, m_ref: u64, order: Order) -> u64 {
    let (num, den) = match order {
        Order::Second => ((1u128 << (2 * mu)) * m_ref as u128, (j as u128) * (j as u128)),
        Order::First => ((1u128 << mu) * m_ref as u128, j as u128),
    };
    (num.div_ceil(den)).min(m_ref as u128) as u64
}

/// Toffoli breakdown of one evaluation of the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityCost {
    pub squarer: u64,
    pub multiplier: u64,
    pub comparator: u64,
    pub ancillas: u64,
}

impl InequalityCost {
    pub fn toffoli(&self) -> u64 {
        self.squarer + self.multiplier + self.comparator
    }
}

pub fn inequality_cost(n: u32, n_ref: u32, order: Order) -> InequalityCost {
    let b = n as u64 - 1;
    let r = n_ref as u64;
    match order {
        Order::Second => InequalityCost {
            squarer: b * b - b,
            multiplier: 4 * b * r - r,
            comparator: 2 * b + r,
            ancillas: 2 * b + r,
        },
        Order::First => InequalityCost { squarer: 0, multiplier: 2 * b * r - r, comparator: b + r, ancillas: b + r },
    }
}

/// Analytic tally of the inequality test: `(n−1)² + (n−1) + 4(n−1)n_ref`
/// Toffolis for order 2 and `2(n−1)n_ref + (n−1)` for order 1.
pub fn tally_inequality_cost(n: u32, n_ref: u32, order: Order) -> Result<GateTally> {
    if n < 2 {
        return Err(Error::Config(format!("n={n} < 2")));
    }
    let c = inequality_cost(n, n_ref, order);
    let mut t = GateTally { ancillas: c.ancillas, ..Default::default() };
    t.analytic.toffoli = c.toffoli();
    t.calls.insert("inequality".into(), 1);
    Ok(t)
}

/// Registers of the PREP stage, in layout order.
pub fn prep_registers(cfg: &PrepConfig) -> Vec<(&'static str, usize)> {
    let b = cfg.boxes() as usize;
    let mut v = vec![("mu", b), ("j", b), ("d", 1)];
    if cfg.order == Order::Second {
        v.push(("a", 1));
    }
    v.push(("ref", cfg.n_ref as usize));
    v.push(("f", 1));
    v
}

/// Layout holding only the PREP registers.
pub fn prep_layout(cfg: &PrepConfig) -> Result<RegisterLayout> {
    RegisterLayout::new(&prep_registers(cfg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepStage {
    /// `Ry(2θ_ini)` on `a` (order 2 only).
    Initial,
    /// Controlled rotations writing the box index in unary.
    Thermometer,
    /// Controlled Hadamards on the low bits of `j`.
    Spread,
    /// Unary to one-hot conversion of `μ`.
    OneHot,
    /// Set the leading bit of `j` from `μ`.
    Lead,
    /// Uniform reference value.
    Reference,
    /// Flag the inequality outcome.
    Inequality,
    /// Invert the flag on the nontrivial branch.
    Flag,
    /// Hadamard on `d` duplicating every `j ≠ 0` over both signs.
    Duplicate,
}

pub const PREP_STAGES: [PrepStage; 9] = [
    PrepStage::Initial,
    PrepStage::Thermometer,
    PrepStage::Spread,
    PrepStage::OneHot,
    PrepStage::Lead,
    PrepStage::Reference,
    PrepStage::Inequality,
    PrepStage::Flag,
    PrepStage::Duplicate,
];

/// Predicate on `(μ, j, ref)`: `μ` is one-hot and the strict inequality holds.
pub fn inequality_predicate(cfg: &PrepConfig) -> PredicateFn {
    let order = cfg.order;
    let m_ref = cfg.m_ref();
    PredicateFn(Arc::new(move |v: &[u64]| {
        let (mu, j, m) = (v[0], v[1], v[2]);
        mu.count_ones() == 1 && inequality_holds(mu.trailing_zeros(), j, m, m_ref, order)
    }))
}

/// Operations of one PREP stage on a layout containing the PREP registers.
pub fn prep_stage_ops(cfg: &PrepConfig, layout: &RegisterLayout, stage: PrepStage) -> Result<Vec<Op>> {
    let b = cfg.boxes() as usize;
    let mu = layout.qubits("mu")?;
    let j = layout.qubits("j")?;
    let d = layout.qubit("d", 0)?;
    let f = layout.qubit("f", 0)?;
    let a = if cfg.order == Order::Second { Some(layout.qubit("a", 0)?) } else { None };
    let mut ops = Vec::new();
    match stage {
        PrepStage::Initial => {
            if let Some(a) = a {
                ops.push(Op::ry(a, 2.0 * theta_ini()));
            }
        }
        PrepStage::Thermometer => {
            for k in 0..b - 1 {
                let op = Op::ry(mu[k], cfg.theta_k(k as u32)?);
                ops.push(match (k, a) {
                    (0, Some(a)) => op.when(vec![ctl(a)]),
                    (0, None) => op,
                    _ => op.when(vec![ctl(mu[k - 1])]),
                });
            }
        }
        PrepStage::Spread => {
            for i in 0..b - 1 {
                ops.push(Op::h(j[i]).when(vec![ctl(mu[i])]));
            }
        }
        PrepStage::OneHot => {
            for k in (0..b - 1).rev() {
                ops.push(Op::cx(mu[k], mu[k + 1]));
            }
            ops.push(match a {
                Some(a) => Op::cx(a, mu[0]),
                None => Op::x(mu[0]),
            });
        }
        PrepStage::Lead => {
            for i in 0..b {
                ops.push(Op::cx(mu[i], j[i]));
            }
        }
        PrepStage::Reference => {
            for q in layout.qubits("ref")? {
                ops.push(Op::h(q));
            }
        }
        PrepStage::Inequality => {
            let c = inequality_cost(cfg.n, cfg.n_ref, cfg.order);
            ops.push(Op::Predicate {
                inputs: vec![mu.clone(), j.clone(), layout.qubits("ref")?],
                flag: f,
                func: inequality_predicate(cfg),
                label: "inequality".into(),
                cost: GateCounts { toffoli: c.toffoli(), ..Default::default() },
                controls: vec![],
            });
        }
        PrepStage::Flag => {
            ops.push(match a {
                Some(a) => Op::cx(a, f),
                None => Op::x(f),
            });
        }
        PrepStage::Duplicate => {
            ops.push(match a {
                Some(a) => Op::h(d).when(vec![ctl(a)]),
                None => Op::h(d),
            });
        }
    }
    Ok(ops)
}

/// Gate-level PREP on any layout containing the PREP registers.
pub fn prep_ops(cfg: &PrepConfig, layout: &RegisterLayout) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    for stage in PREP_STAGES {
        ops.extend(prep_stage_ops(cfg, layout, stage)?);
    }
    Ok(ops)
}

/// Gate-level PREP circuit on the minimal layout.
pub fn build_prep(cfg: &PrepConfig) -> Result<Circuit> {
    let layout = prep_layout(cfg)?;
    let mut c = Circuit::new(layout.clone());
    c.extend(prep_ops(cfg, &layout)?)?;
    c.scratch = inequality_cost(cfg.n, cfg.n_ref, cfg.order).ancillas;
    Ok(c)
}

/// Result of simulating PREP.
#[derive(Debug, Clone)]
pub struct PrepOutcome {
    pub config: PrepConfig,
    pub state: Statevector,
    /// Probability of the success branch `f = 0`.
    pub probability: f64,
    /// Success-branch probability per `(μ, j, d)`, summed over the other
    /// registers.
    pub weights: BTreeMap<(u64, u64, u64), f64>,
}

impl PrepOutcome {
    /// Success-branch probability per `(j, d)`.
    pub fn profile(&self) -> BTreeMap<(u64, u64), f64> {
        let mut p = BTreeMap::new();
        for (&(_, j, d), &w) in &self.weights {
            *p.entry((j, d)).or_insert(0.0) += w;
        }
        p
    }

    /// Effective amplitude `√p(j, d)` on the success branch.
    pub fn amplitude(&self, j: u64, d: u64) -> f64 {
        self.profile().get(&(j, d)).copied().unwrap_or(0.0).sqrt()
    }

    /// Success profile indexed by coefficient position (`d=1 → j`,
    /// `d=0 → N−j`).
    pub fn coefficient_profile(&self) -> Vec<f64> {
        let n = self.config.size();
        let mut v = vec![0.0; n];
        for ((j, d), p) in self.profile() {
            v[coefficient_index(j, d, n)] += p;
        }
        v
    }
}

/// Coefficient index addressed by `(j, d)`: `d = 1` adds `j`, `d = 0`
/// subtracts it.
pub fn coefficient_index(j: u64, d: u64, size: usize) -> usize {
    if d == 1 {
        j as usize % size
    } else {
        (size - j as usize % size) % size
    }
}

/// Runs gate-level PREP from `|0⟩` and tabulates the success branch.
pub fn simulate_prep(cfg: &PrepConfig) -> Result<PrepOutcome> {
    let circuit = build_prep(cfg)?;
    let mut state = Statevector::new(circuit.layout.clone())?;
    state.run(&circuit)?;
    let l = &circuit.layout;
    let (mu, j, d, f) = (l.register("mu")?, l.register("j")?, l.register("d")?, l.register("f")?);
    let field = |i: usize, off: usize, w: usize| ((i >> off) & ((1 << w) - 1)) as u64;
    let mut weights = BTreeMap::new();
    let mut probability = 0.0;
    for (i, z) in state.amplitudes().iter().enumerate() {
        let p = z.norm_sqr();
        if p == 0.0 || (i >> f.offset) & 1 == 1 {
            continue;
        }
        probability += p;
        let key = (field(i, mu.offset, mu.width), field(i, j.offset, j.width), field(i, d.offset, 1));
        *weights.entry(key).or_insert(0.0) += p;
    }
    Ok(PrepOutcome { config: *cfg, state, probability, weights })
}

/// Success probability implied by the closed-form acceptance counts.
pub fn success_probability(cfg: &PrepConfig) -> f64 {
    let m = cfg.m_ref() as f64;
    let mut p = match cfg.order {
        Order::Second => theta_ini().cos().powi(2),
        Order::First => 0.0,
    };
    let lead = match cfg.order {
        Order::Second => theta_ini().sin().powi(2),
        Order::First => 1.0,
    };
    for mu in 0..cfg.boxes() {
        let width = 1u64 << mu;
        let acc: u64 = (width..2 * width).map(|j| accept_count(mu, j, cfg.m_ref(), cfg.order)).sum();
        p += lead * cfg.box_probability(mu) * acc as f64 / (width as f64 * m);
    }
    p
}

/// Success profile in the `M → ∞` limit, indexed by coefficient position.
pub fn limit_profile(cfg: &PrepConfig) -> Vec<f64> {
    let n = cfg.size();
    let b = cfg.boxes() as i32;
    let mut v = vec![0.0; n];
    let half = n / 2;
    match cfg.order {
        Order::Second => {
            let s2 = theta_ini().sin().powi(2);
            v[0] = theta_ini().cos().powi(2);
            for j in 1..half {
                let p = s2 / (4.0 * (1.0 - 2f64.powi(-b)) * (j * j) as f64);
                v[j] += p;
                v[n - j] += p;
            }
        }
        Order::First => {
            for j in 1..half {
                let p = 1.0 / (2.0 * b as f64 * j as f64);
                v[j] += p;
                v[n - j] += p;
            }
        }
    }
    v
}

fn sqrt_unit(p: &[f64]) -> Vec<f64> {
    let s: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    let nrm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.iter().map(|x| x / nrm).collect()
}

/// Finite-`M` preparation error: L2 distance between the normalised
/// amplitude profile `√p` and its `M → ∞` limit.
pub fn prep_error(outcome: &PrepOutcome) -> f64 {
    let a = sqrt_unit(&outcome.coefficient_profile());
    let b = sqrt_unit(&limit_profile(&outcome.config));
    a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Unit vector over `j ∈ [0, N)` with entries `∝ √|c_j|` of the truncated
/// coefficients (no finite-`M` corrections).
pub fn analytic_target(order: Order, n: u32) -> Result<Vec<f64>> {
    let op = crate::slac::truncated(order, LatticeConfig::new(n)?);
    let mags: Vec<f64> = op.coeffs.iter().map(|z| z.norm()).collect();
    Ok(sqrt_unit(&mags))
}

/// Registers touched by the analytic PREP oracle.
pub fn analytic_registers(order: Order) -> Vec<&'static str> {
    match order {
        Order::Second => vec!["j", "d", "a", "f"],
        Order::First => vec!["j", "d", "f"],
    }
}

/// Exact `M → ∞` PREP state over the qubits of [`analytic_registers`]
/// (packed in that order): `√(|c_j|/α)` on the success branch, remainder on
/// `f = 1`.
pub fn analytic_load_target(order: Order, n: u32) -> Result<Vec<C64>> {
    LatticeConfig::new(n)?;
    if n < 3 {
        return Err(Error::Config(format!("n={n} < 3")));
    }
    let b = n as usize - 1;
    let half = 1u64 << (n - 1);
    let alpha = alpha(order, n);
    let (d_off, a_off) = (b, b + 1);
    let f_off = match order {
        Order::Second => b + 2,
        Order::First => b + 1,
    };
    let mut t = vec![ZERO; 1 << (f_off + 1)];
    let mut used = 0.0;
    if order == Order::Second {
        let w = PI * PI / 3.0 / alpha;
        t[0] = C64::new(w.sqrt(), 0.0);
        used += w;
    }
    for j in 1..half {
        let w = match order {
            Order::Second => 2.0 / (j * j) as f64 / alpha,
            Order::First => 1.0 / j as f64 / alpha,
        };
        for d in 0..2u64 {
            let mut idx = j as usize | (d as usize) << d_off;
            if order == Order::Second {
                idx |= 1 << a_off;
            }
            t[idx] = C64::new(w.sqrt(), 0.0);
            used += w;
        }
    }
    let rest = 1.0 - used;
    if rest < -1e-12 {
        return Err(Error::Config(format!("target weights exceed one by {}", -rest)));
    }
    t[1 << f_off] = C64::new(rest.max(0.0).sqrt(), 0.0);
    Ok(t)
}

/// Analytic PREP as a single loading oracle on `layout`.
pub fn analytic_prep_op(order: Order, n: u32, layout: &RegisterLayout) -> Result<Op> {
    let mut qubits = Vec::new();
    for r in analytic_registers(order) {
        qubits.extend(layout.qubits(r)?);
    }
    Ok(Op::Load { qubits, target: Arc::new(analytic_load_target(order, n)?), adjoint: false, controls: vec![] })
}

/// Largest `n` whose gate-level PREP at reference width `n_ref` fits the
/// default simulation cap.
pub fn max_simulable_n(n_ref: u32, order: Order) -> u32 {
    let extra = match order {
        Order::Second => 3,
        Order::First => 2,
    };
    ((DEFAULT_QUBIT_CAP as u32).saturating_sub(n_ref + extra)) / 2 + 1
}

/// Control selecting the success branch of the flag.
pub fn success_control(layout: &RegisterLayout) -> Result<crate::qsim::Control> {
    Ok(anti(layout.qubit("f", 0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxes() {
        assert_eq!(box_of(1).unwrap(), 0);
        assert_eq!(box_of(5).unwrap(), 2);
        assert_eq!(box_of(8).unwrap(), 3);
        assert!(box_of(0).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(accept_count(0, 1, 16, Order::Second), 16);
        assert_eq!(accept_count(1, 3, 16, Order::Second), 8);
        assert_eq!(accept_count(2, 5, 16, Order::First), 13);
    }

    #[test]
    fn inequality_tallies() {
        let c = inequality_cost(5, 5, Order::Second);
        assert_eq!(c.squarer, 12);
        assert_eq!(c.toffoli(), 100);
        assert_eq!(inequality_cost(5, 5, Order::First).toffoli(), 44);
    }

    #[test]
    fn initial_angle() {
        let c = theta_ini().cos().powi(2);
        assert!((c - PI * PI / (PI * PI + 24.0)).abs() < 1e-15);
    }

    #[test]
    fn cascade_reproduces_box_probabilities() {
        for order in [Order::First, Order::Second] {
            let cfg = PrepConfig::new(6, 4, order).unwrap();
            let mut rest = 1.0;
            for k in 0..cfg.boxes() - 1 {
                let stay = (cfg.theta_k(k).unwrap() / 2.0).cos().powi(2);
                assert!((rest * stay - cfg.box_probability(k)).abs() < 1e-12);
                rest *= 1.0 - stay;
            }
            assert!((rest - cfg.box_probability(cfg.boxes() - 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn load_target_is_unit() {
        for order in [Order::First, Order::Second] {
            for n in 3..7 {
                let t = analytic_load_target(order, n).unwrap();
                let s: f64 = t.iter().map(|z| z.norm_sqr()).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_small_lattices() {
        assert!(PrepConfig::new(2, 4, Order::Second).is_err());
        assert!(PrepConfig::new(4, 1, Order::Second).is_err());
    }
}
