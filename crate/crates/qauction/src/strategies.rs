//! One-dimensional player strategies: probability densities over log-prices.
//!
//! A strategy η(q) is everything the analytic machinery needs to know about a
//! player: its pointwise density, its survival function S(q) = ∫_q^∞ η (the
//! probability of bidding above q), the log of that survival (so S^{N−1}
//! survives N ~ 1e4 without underflow), and how to draw from it.
//!
//! Survival at an atom is inclusive — Dirac(q0) has S(q0) = 1 — which keeps
//! the rationality bracket [q + p ≤ 0] consistent when both sides are
//! deterministic.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::error::{QError, QResult};
use crate::numeric::normal::{std_density, std_log_survival, std_survival};
use crate::numeric::{log_sum_exp, quad};

/// Mixture weights must sum to 1 this tightly.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Absolute quadrature tolerance for order-statistic means.
pub const ORDER_STAT_TOL: f64 = 1e-9;

/// A player's mixed strategy over the log-price axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "StrategyRaw")]
pub enum Strategy {
    /// Gaussian density with mean `mu` and dispersion `sigma` (log-price units).
    Gaussian { mu: f64, sigma: f64 },
    /// A deterministic log-price: all mass at `q0`.
    Dirac { q0: f64 },
    /// Convex combination of sub-strategies.
    Mixture {
        weights: Vec<f64>,
        components: Vec<Strategy>,
    },
    /// Piecewise-linear density on a finite grid, renormalized at build time.
    Tabulated(Tabulated),
}

impl Strategy {
    pub fn gaussian(mu: f64, sigma: f64) -> QResult<Self> {
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(QError::InvalidStrategy("gaussian parameters must be finite".into()));
        }
        if sigma <= 0.0 {
            return Err(QError::InvalidStrategy(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Strategy::Gaussian { mu, sigma })
    }

    pub fn dirac(q0: f64) -> QResult<Self> {
        if !q0.is_finite() {
            return Err(QError::InvalidStrategy("dirac location must be finite".into()));
        }
        Ok(Strategy::Dirac { q0 })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<Strategy>) -> QResult<Self> {
        if weights.len() != components.len() {
            return Err(QError::InvalidStrategy(format!(
                "mixture has {} weights but {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.is_empty() {
            return Err(QError::InvalidStrategy("mixture must have at least one component".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(QError::InvalidStrategy("mixture weights must be finite and ≥ 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(QError::InvalidStrategy(format!(
                "mixture weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(Strategy::Mixture { weights, components })
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> QResult<Self> {
        Ok(Strategy::Tabulated(Tabulated::new(grid, values)?))
    }

    /// η(q). Errors when the strategy carries an atom at `q` (a Dirac
    /// anywhere, or a mixture whose atom sits exactly on `q`): a point mass
    /// has no pointwise density.
    pub fn density(&self, q: f64) -> QResult<f64> {
        match self {
            Strategy::Gaussian { mu, sigma } => Ok(std_density((q - mu) / sigma) / sigma),
            Strategy::Dirac { .. } => Err(QError::NoPointwiseDensity),
            Strategy::Mixture { weights, components } => {
                let mut total = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    if *w == 0.0 {
                        continue;
                    }
                    match c {
                        // An atom contributes no density away from its site.
                        Strategy::Dirac { q0 } if *q0 != q => {}
                        _ => total += w * c.density(q)?,
                    }
                }
                Ok(total)
            }
            Strategy::Tabulated(t) => Ok(t.density(q)),
        }
    }

    /// S(q) = ∫_q^∞ η(r) dr, inclusive at atoms: P(bid ≥ q).
    pub fn survival(&self, q: f64) -> f64 {
        match self {
            Strategy::Gaussian { mu, sigma } => std_survival((q - mu) / sigma),
            Strategy::Dirac { q0 } => {
                if q <= *q0 {
                    1.0
                } else {
                    0.0
                }
            }
            Strategy::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.survival(q))
                .sum(),
            Strategy::Tabulated(t) => t.survival(q),
        }
    }

    /// ln S(q), exact to sub-1e-12 in the reconstructed survival wherever
    /// S ≥ 1e-300. Returns −∞ where the survival is exactly zero (beyond a
    /// tabulated grid, past an atom).
    pub fn log_survival(&self, q: f64) -> f64 {
        match self {
            Strategy::Gaussian { mu, sigma } => std_log_survival((q - mu) / sigma),
            Strategy::Dirac { q0 } => {
                if q <= *q0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Strategy::Mixture { weights, components } => {
                let terms: Vec<f64> = weights
                    .iter()
                    .zip(components)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, c)| w.ln() + c.log_survival(q))
                    .collect();
                log_sum_exp(&terms)
            }
            Strategy::Tabulated(t) => t.survival(q).ln(),
        }
    }

    /// Draw one log-price. Deterministic strategies consume no randomness
    /// beyond what their continuous components need.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Strategy::Gaussian { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            Strategy::Dirac { q0 } => *q0,
            Strategy::Mixture { weights, components } => {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    cum += w;
                    if u < cum {
                        return c.sample(rng);
                    }
                }
                // Weight rounding can leave cum marginally below 1.
                components.last().expect("mixture is non-empty").sample(rng)
            }
            Strategy::Tabulated(t) => t.sample(rng),
        }
    }

    /// Density of 𝔮′ = min{𝔮₁, …, 𝔮_N} for N independent draws:
    /// N·η(q)·S(q)^{N−1}, with the power taken in the log domain.
    pub fn first_order_statistic_density(&self, n: u32, q: f64) -> QResult<f64> {
        ensure_n_at_least(n, 1)?;
        let density = self.density(q)?;
        Ok(n as f64 * density * ((n as f64 - 1.0) * self.log_survival(q)).exp())
    }

    /// E(𝔮′) by adaptive quadrature over the N-widened support window.
    pub fn order_stat_mean(&self, n: u32) -> QResult<f64> {
        ensure_n_at_least(n, 1)?;
        self.ensure_no_atoms()?;
        let (lo, hi) = self.quad_bounds(n);
        let nf = n as f64;
        quad::integrate(
            &|q| {
                let d = self.density(q).expect("atoms were ruled out above");
                q * nf * d * ((nf - 1.0) * self.log_survival(q)).exp()
            },
            lo,
            hi,
            ORDER_STAT_TOL,
        )
    }

    /// Truncation window for quadrature against S^{N−1}-weighted integrands.
    /// The minimum of N Gaussians concentrates near μ − √(2 ln N)·σ, so the
    /// left edge widens with N while 8σ suffices on the right.
    pub fn quad_bounds(&self, n: u32) -> (f64, f64) {
        let widen = (2.0 * (n.max(1) as f64).ln()).sqrt();
        match self {
            Strategy::Gaussian { mu, sigma } => (mu - (8.0 + widen) * sigma, mu + 8.0 * sigma),
            Strategy::Dirac { q0 } => (*q0, *q0),
            Strategy::Mixture { components, .. } => components
                .iter()
                .map(|c| c.quad_bounds(n))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (clo, chi)| {
                    (lo.min(clo), hi.max(chi))
                }),
            Strategy::Tabulated(t) => (t.grid[0], *t.grid.last().expect("grid has ≥ 2 points")),
        }
    }

    /// Does any part of this strategy concentrate mass on a single point?
    pub fn has_atoms(&self) -> bool {
        match self {
            Strategy::Dirac { .. } => true,
            Strategy::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .any(|(w, c)| *w > 0.0 && c.has_atoms()),
            _ => false,
        }
    }

    /// Total point mass sitting exactly at `q` (0 for continuous strategies).
    pub fn atom_mass_at(&self, q: f64) -> f64 {
        match self {
            Strategy::Dirac { q0 } => {
                if *q0 == q {
                    1.0
                } else {
                    0.0
                }
            }
            Strategy::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| w * c.atom_mass_at(q))
                .sum(),
            _ => 0.0,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Strategy::Gaussian { .. })
    }

    pub(crate) fn ensure_no_atoms(&self) -> QResult<()> {
        if self.has_atoms() {
            Err(QError::NoPointwiseDensity)
        } else {
            Ok(())
        }
    }
}

pub(crate) fn ensure_n_at_least(n: u32, min: u32) -> QResult<()> {
    if n < min {
        Err(QError::Domain(format!("N must be ≥ {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// Piecewise-linear density on a strictly increasing grid. Values are
/// renormalized at construction so the trapezoid integral is exactly 1;
/// the cumulative integral (piecewise quadratic) is precomputed per node
/// for survival evaluation and inverse-CDF sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    grid: Vec<f64>,
    values: Vec<f64>,
    cdf: Vec<f64>,
}

impl Tabulated {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> QResult<Self> {
        if grid.len() != values.len() {
            return Err(QError::InvalidStrategy(format!(
                "tabulated grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(QError::InvalidStrategy("tabulated grid needs at least 2 points".into()));
        }
        if grid.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(QError::InvalidStrategy("tabulated entries must be finite".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QError::InvalidStrategy("tabulated grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(QError::InvalidStrategy("tabulated values must be ≥ 0".into()));
        }
        let raw_mass: f64 = grid
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum();
        if raw_mass <= 0.0 {
            return Err(QError::InvalidStrategy("tabulated density has zero total mass".into()));
        }
        let values: Vec<f64> = values.iter().map(|v| v / raw_mass).collect();
        let mut cdf = Vec::with_capacity(grid.len());
        cdf.push(0.0);
        for i in 1..grid.len() {
            let cell = 0.5 * (grid[i] - grid[i - 1]) * (values[i - 1] + values[i]);
            cdf.push(cdf[i - 1] + cell);
        }
        // Rounding in the cell sums can land a hair off 1; pin the endpoint
        // so sampling at u → 1 cannot fall off the grid.
        *cdf.last_mut().expect("cdf is non-empty") = 1.0;
        Ok(Tabulated { grid, values, cdf })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation inside the grid, zero outside.
    pub fn density(&self, q: f64) -> f64 {
        let Some(i) = self.cell_of(q) else { return 0.0 };
        let t = (q - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.values[i] + (self.values[i + 1] - self.values[i]) * t
    }

    /// 1 − CDF(q), exact for the piecewise-linear density.
    pub fn survival(&self, q: f64) -> f64 {
        if q <= self.grid[0] {
            return 1.0;
        }
        let Some(i) = self.cell_of(q) else { return 0.0 };
        (1.0 - self.cdf[i] - self.mass_into_cell(i, q)).max(0.0)
    }

    /// Inverse-CDF draw: pick the cell by cumulative mass, then solve the
    /// in-cell quadratic for the exact quantile.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = match self.cdf.partition_point(|c| *c <= u) {
            0 => 0,
            k if k >= self.cdf.len() => self.cdf.len() - 2,
            k => k - 1,
        };
        let r = u - self.cdf[i];
        let h = self.grid[i + 1] - self.grid[i];
        let slope_half = 0.5 * (self.values[i + 1] - self.values[i]) / h;
        // Solve v_i·t + slope_half·t² = r for t ∈ [0, h]; the conjugate form
        // stays stable as the slope term vanishes.
        let disc = (self.values[i] * self.values[i] + 4.0 * slope_half * r).max(0.0);
        let denom = self.values[i] + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.5 * h };
        self.grid[i] + t.clamp(0.0, h)
    }

    /// Index of the cell [gridᵢ, gridᵢ₊₁) containing q, if any.
    fn cell_of(&self, q: f64) -> Option<usize> {
        if q < self.grid[0] || q > *self.grid.last().expect("grid has ≥ 2 points") {
            return None;
        }
        let i = self.grid.partition_point(|x| *x <= q);
        Some(if i == 0 { 0 } else { (i - 1).min(self.grid.len() - 2) })
    }

    /// ∫ density from gridᵢ to q (q within cell i).
    fn mass_into_cell(&self, i: usize, q: f64) -> f64 {
        let h = self.grid[i + 1] - self.grid[i];
        let t = q - self.grid[i];
        self.values[i] * t + 0.5 * (self.values[i + 1] - self.values[i]) / h * t * t
    }
}

/// The JSON shape: {"type": "gaussian", "mu": .., "sigma": ..} and friends.
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum StrategyRaw {
    Gaussian { mu: f64, sigma: f64 },
    Dirac { q0: f64 },
    Mixture { weights: Vec<f64>, components: Vec<Strategy> },
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

impl TryFrom<StrategyRaw> for Strategy {
    type Error = QError;

    fn try_from(raw: StrategyRaw) -> QResult<Self> {
        match raw {
            StrategyRaw::Gaussian { mu, sigma } => Strategy::gaussian(mu, sigma),
            StrategyRaw::Dirac { q0 } => Strategy::dirac(q0),
            StrategyRaw::Mixture { weights, components } => Strategy::mixture(weights, components),
            StrategyRaw::Tabulated { grid, values } => Strategy::tabulated(grid, values),
        }
    }
}
