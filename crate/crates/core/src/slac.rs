//! Classical SLAC derivative operators on a periodic lattice of `N = 2^n` sites
//! with unit spacing.
//!
//! Every operator here is circulant: it is stored as its first column of
//! coefficients `c_j`, and the dense matrix has entry `(r, c) = c_{(r-c) mod N}`.
//! With that convention the shift `to_dense(e_1)` maps `|x⟩ → |x+1⟩`.

use crate::linalg::{cis, ZERO};
use crate::{CMat, Error, Result, C64};
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Largest lattice for which dense matrices are materialised.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    n: u32,
}

impl LatticeConfig {
    /// Lattice with `2^n` sites; `n ≥ 2`.
    pub fn new(n: u32) -> Result<Self> {
        if !(2..=30).contains(&n) {
            return Err(Error::Config(format!("qubit count n={n} must lie in 2..=30")));
        }
        Ok(Self { n })
    }

    pub fn from_size(size: usize) -> Result<Self> {
        if !size.is_power_of_two() {
            return Err(Error::Config(format!("lattice size {size} is not a power of two")));
        }
        Self::new(size.trailing_zeros())
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        1usize << self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Exact,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn from_int(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::Config(format!("derivative order {k} not in {{1,2}}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CirculantOperator {
    pub coeffs: Vec<C64>,
    pub order: Order,
    pub variant: Variant,
}

fn sign(j: usize) -> f64 {
    // (-1)^{1+j}
    if j % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Kernel of the SLAC derivative on the infinite lattice at separation `r`.
pub fn infinite_kernel(r: i64, order: Order) -> C64 {
    let rf = r as f64;
    let alt = if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match (order, r) {
        (Order::Second, 0) => C64::new(-PI * PI / 3.0, 0.0),
        (Order::Second, _) => C64::new(-2.0 * alt / (rf * rf), 0.0),
        (Order::First, 0) => ZERO,
        (Order::First, _) => C64::new(-alt / rf, 0.0),
    }
}

/// Second derivative with the exact `−q²` symbol on the finite periodic lattice.
pub fn exact_laplacian(cfg: LatticeConfig) -> CirculantOperator {
    let n = cfg.size();
    let nf = n as f64;
    let coeffs = (0..n)
        .map(|j| {
            if j == 0 {
                C64::new(-PI * PI / 3.0 - 2.0 * PI * PI / (3.0 * nf * nf), 0.0)
            } else {
                let s = (PI * j as f64 / nf).sin();
                C64::new(2.0 * PI * PI * sign(j) / (nf * nf * s * s), 0.0)
            }
        })
        .collect();
    CirculantOperator { coeffs, order: Order::Second, variant: Variant::Exact }
}

/// Infinite-lattice Laplacian kernel folded onto the ring, midpoint dropped.
pub fn truncated_laplacian(cfg: LatticeConfig) -> CirculantOperator {
    let n = cfg.size();
    let coeffs = (0..n)
        .map(|j| {
            let v = if j == 0 {
                -PI * PI / 3.0
            } else if j < n / 2 {
                2.0 * sign(j) / (j * j) as f64
            } else if j == n / 2 {
                0.0
            } else {
                let m = (n - j) as f64;
                2.0 * sign(j) / (m * m)
            };
            C64::new(v, 0.0)
        })
        .collect();
    CirculantOperator { coeffs, order: Order::Second, variant: Variant::Truncated }
}

/// First derivative with the exact `iq` symbol; anti-Hermitian.
pub fn exact_first_order(cfg: LatticeConfig) -> CirculantOperator {
    let n = cfg.size();
    let nf = n as f64;
    let coeffs = (0..n)
        .map(|j| {
            if j == 0 {
                C64::new(0.0, -PI / nf)
            } else {
                let x = PI * j as f64 / nf;
                C64::new(x.cos() / x.sin(), 1.0) * (PI * sign(j) / nf)
            }
        })
        .collect();
    CirculantOperator { coeffs, order: Order::First, variant: Variant::Exact }
}

/// Infinite-lattice first-derivative kernel folded onto the ring with the
/// half-site phase `e^{iπj/N}`.
pub fn truncated_first_order(cfg: LatticeConfig) -> CirculantOperator {
    let n = cfg.size();
    let nf = n as f64;
    let coeffs = (0..n)
        .map(|j| {
            if j == 0 || j == n / 2 {
                ZERO
            } else {
                let m = if j < n / 2 { j } else { n - j } as f64;
                cis(PI * j as f64 / nf) * (sign(j) / m)
            }
        })
        .collect();
    CirculantOperator { coeffs, order: Order::First, variant: Variant::Truncated }
}

/// Truncated operator of the given order (the one the circuits encode).
pub fn truncated(order: Order, cfg: LatticeConfig) -> CirculantOperator {
    match order {
        Order::First => truncated_first_order(cfg),
        Order::Second => truncated_laplacian(cfg),
    }
}

pub fn exact(order: Order, cfg: LatticeConfig) -> CirculantOperator {
    match order {
        Order::First => exact_first_order(cfg),
        Order::Second => exact_laplacian(cfg),
    }
}

impl CirculantOperator {
    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_dense(&self) -> Result<CMat> {
        to_dense(&self.coeffs)
    }

    pub fn spectrum(&self) -> Vec<C64> {
        circulant_spectrum(&self.coeffs)
    }

    /// Sum of coefficient magnitudes, the LCU 1-norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Dense circulant matrix with entry `(r, c) = coeffs[(r − c) mod N]`.
pub fn to_dense(coeffs: &[C64]) -> Result<CMat> {
    let n = coeffs.len();
    if n > DENSE_LIMIT {
        return Err(Error::Range(format!("dense size {n} exceeds limit {DENSE_LIMIT}")));
    }
    Ok(CMat::from_fn(n, n, |r, c| coeffs[(r + n - c) % n]))
}

/// Cyclic shift `|x⟩ → |x + j mod N⟩`.
pub fn shift_matrix(size: usize, j: usize) -> CMat {
    CMat::from_fn(size, size, |r, c| if (c + j) % size == r { C64::new(1.0, 0.0) } else { ZERO })
}

/// Eigenvalues `λ_k = Σ_j c_j e^{−2πijk/N}`; eigenvector `k` is the DFT
/// column `e^{+2πirk/N}`.
pub fn circulant_spectrum(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf
}

/// Momentum index `k ∈ 0..N` mapped into the window `(−N/2, N/2]`.
pub fn signed_momentum(k: usize, size: usize) -> i64 {
    if k <= size / 2 {
        k as i64
    } else {
        k as i64 - size as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    pub label: String,
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Finite Fourier sum `2 Σ_{j=1}^{N−1} (−1)^{j+1} sin(jq)/j`.
pub fn d_trunc(q: f64, size: usize) -> f64 {
    (1..size).map(|j| 2.0 * sign(j) * (j as f64 * q).sin() / j as f64).sum()
}

/// Finite Fourier sum `π²/3 + 4 Σ_{j=1}^{N−1} (−1)^j cos(jq)/j²`.
pub fn laplacian_trunc(q: f64, size: usize) -> f64 {
    PI * PI / 3.0
        + (1..size)
            .map(|j| {
                let jf = j as f64;
                -4.0 * sign(j) * (jf * q).cos() / (jf * jf)
            })
            .sum::<f64>()
}

/// Grid of `samples` momenta `−π + 2π(i+1)/samples`, ending exactly at `π`.
pub fn momentum_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|i| -PI + 2.0 * PI * (i + 1) as f64 / samples as f64).collect()
}

/// Continuum, nearest-neighbour and truncated SLAC symbols, in that order for
/// each derivative order.
pub fn symbol_table(cfg: LatticeConfig, samples: usize) -> Result<Vec<FourierSymbol>> {
    if samples < 16 {
        return Err(Error::Config(format!("need at least 16 samples, got {samples}")));
    }
    let q = momentum_grid(samples);
    let n = cfg.size();
    let make = |label: &str, f: &dyn Fn(f64) -> f64| FourierSymbol {
        label: label.to_string(),
        q_grid: q.clone(),
        values: q.iter().map(|&x| f(x)).collect(),
    };
    Ok(vec![
        make("continuum_d1", &|x| x),
        make("fd_d1", &|x| x.sin()),
        make("slac_trunc_d1", &|x| d_trunc(x, n)),
        make("continuum_d2", &|x| x * x),
        make("fd_d2", &|x| 4.0 * (x / 2.0).sin().powi(2)),
        make("slac_trunc_d2", &|x| laplacian_trunc(x, n)),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionSpec {
    pub k_max: usize,
}

impl ProjectionSpec {
    pub fn new(k_max: usize, cfg: LatticeConfig) -> Result<Self> {
        if k_max == 0 || k_max > cfg.size() / 2 {
            return Err(Error::Config(format!("k_max={k_max} outside (0, N/2]")));
        }
        Ok(Self { k_max })
    }

    /// Low-momentum window `floor(N/2.5)`.
    pub fn default_for(cfg: LatticeConfig) -> Self {
        Self { k_max: (cfg.size() as f64 / 2.5).floor() as usize }
    }
}

/// Operator norm of `exact − truncated`, optionally restricted to `|k| ≤ k_max`.
pub fn truncation_error(
    exact: &CirculantOperator,
    truncated: &CirculantOperator,
    proj: Option<ProjectionSpec>,
) -> Result<f64> {
    if exact.size() != truncated.size() || exact.order != truncated.order {
        return Err(Error::Dimension("operators differ in size or order".into()));
    }
    if exact.order == Order::First && proj.is_none() {
        return Err(Error::Config("first-order error needs a momentum projection".into()));
    }
    let n = exact.size();
    let diff: Vec<C64> = exact.coeffs.iter().zip(&truncated.coeffs).map(|(a, b)| a - b).collect();
    let spec = circulant_spectrum(&diff);
    Ok(spec
        .iter()
        .enumerate()
        .filter(|(k, _)| match proj {
            Some(p) => signed_momentum(*k, n).unsigned_abs() as usize <= p.k_max,
            None => true,
        })
        .fold(0.0, |acc, (_, v)| acc.max(v.norm())))
}
