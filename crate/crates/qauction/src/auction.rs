//! Transaction probability measures: who wins, at what log-price, and
//! whether the seller's rationality condition admits the deal.
//!
//! The N-dimensional transaction measure factorizes analytically: the
//! "bidder k wins" brackets integrate to a product of rival survival
//! functions, and the seller's acceptance bracket integrates to her CDF at
//! the winning bid. The quadrature path never performs the N-dimensional
//! integral — that reduction is exercised independently by the Monte Carlo
//! module and by a brute-force lattice oracle in the test suite.

use serde::Deserialize;

use crate::error::{QError, QResult};
use crate::strategies::{ensure_n_at_least, Strategy};

/// The seller's withdrawal log-price p′, with the unconditional limit
/// p′ → −∞ as a first-class value rather than a large negative float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Withdrawal {
    MinusInfinity,
    Finite(f64),
}

impl Withdrawal {
    /// The rationality bracket [q + p′ ≤ 0]: can a deal at log-price q close?
    pub fn admits(self, q: f64) -> bool {
        match self {
            Withdrawal::MinusInfinity => true,
            Withdrawal::Finite(p) => q + p <= 0.0,
        }
    }

    /// Upper integration limit −p′ of the acceptance region.
    pub fn acceptance_cap(self) -> f64 {
        match self {
            Withdrawal::MinusInfinity => f64::INFINITY,
            Withdrawal::Finite(p) => -p,
        }
    }
}

impl From<f64> for Withdrawal {
    fn from(p: f64) -> Self {
        Withdrawal::Finite(p)
    }
}

/// The rationality condition [q + p ≤ 0], boundary included: the deal closes
/// when the winning bid reaches the seller's withdrawal price.
pub fn rationality(q: f64, p: f64) -> bool {
    q + p <= 0.0
}

/// One auction: a seller strategy over 𝔭 (the log withdrawal price) and
/// N ≥ 1 bidder strategies over 𝔮ₖ (negated log withdrawal prices, so that
/// small 𝔮 is a strong bid).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "AuctionConfigRaw")]
pub struct AuctionConfig {
    pub seller: Strategy,
    pub bidders: Vec<Strategy>,
}

impl AuctionConfig {
    pub fn new(seller: Strategy, bidders: Vec<Strategy>) -> QResult<Self> {
        if bidders.is_empty() {
            return Err(QError::Domain("an auction needs at least one bidder".into()));
        }
        Ok(AuctionConfig { seller, bidders })
    }

    pub fn n_bidders(&self) -> usize {
        self.bidders.len()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuctionConfigRaw {
    seller: Strategy,
    bidders: Vec<Strategy>,
}

impl TryFrom<AuctionConfigRaw> for AuctionConfig {
    type Error = QError;

    fn try_from(raw: AuctionConfigRaw) -> QResult<Self> {
        AuctionConfig::new(raw.seller, raw.bidders)
    }
}

/// P(𝔭 ≤ −q): the probability the seller accepts a deal at log-price q.
/// Inclusive at seller atoms — survival counts an atom at −q as "above",
/// so it is added back.
pub fn acceptance_probability(seller: &Strategy, q: f64) -> f64 {
    (1.0 - seller.survival(-q) + seller.atom_mass_at(-q)).clamp(0.0, 1.0)
}

/// The transaction density for bidder k at log-price q_k:
/// η_k(q_k) · ∏_{m≠k} S_m(q_k) · P(𝔭 ≤ −q_k).
///
/// Rival atoms exactly at q_k make the winner ambiguous with positive
/// probability; the analytic path refuses such ties (the Monte Carlo path
/// resolves them uniformly at random instead).
pub fn transaction_density(cfg: &AuctionConfig, k: usize, q_k: f64) -> QResult<f64> {
    if k >= cfg.bidders.len() {
        return Err(QError::Domain(format!(
            "bidder index {k} out of range for {} bidders",
            cfg.bidders.len()
        )));
    }
    let density = cfg.bidders[k].density(q_k)?;
    let mut log_rival_survival = 0.0;
    for (m, rival) in cfg.bidders.iter().enumerate() {
        if m == k {
            continue;
        }
        if rival.atom_mass_at(q_k) > 0.0 {
            return Err(QError::TieAmbiguity { q: q_k });
        }
        log_rival_survival += rival.log_survival(q_k);
    }
    Ok(density * log_rival_survival.exp() * acceptance_probability(&cfg.seller, q_k))
}

/// The per-bidder winner measure under N identical strategies:
/// [q + p′ ≤ 0] · η(q) · S(q)^{N−1}. No factor N — this is one bidder's
/// share; the first-order statistic carries the N.
pub fn winner_measure_identical(eta: &Strategy, n: u32, p_prime: Withdrawal, q: f64) -> QResult<f64> {
    ensure_n_at_least(n, 1)?;
    if !p_prime.admits(q) {
        return Ok(0.0);
    }
    let density = eta.density(q)?;
    Ok(density * ((n as f64 - 1.0) * eta.log_survival(q)).exp())
}

/// The dominant-bidder reduction: when one bidder's offers win essentially
/// always, the transaction measure collapses to [q + p′ ≤ 0] · η(q).
/// Dominance is never auto-detected; callers choose this reduction.
pub fn dominant_bidder_measure(eta_kprime: &Strategy, p_prime: Withdrawal, q: f64) -> QResult<f64> {
    if !p_prime.admits(q) {
        return Ok(0.0);
    }
    eta_kprime.density(q)
}
