//! Seller and bidder profit-intensity functionals and their maximization.
//!
//! The seller's intensity at withdrawal log-price p′ is the ratio
//!
//! ```text
//!            −∫_{−∞}^{−p′} q·η(q)·S(q)^{N−1} dq
//! ρ_N(p′) = ────────────────────────────────────
//!            1/N + ∫_{−∞}^{−p′} η(q)·S(q)^{N−1} dq
//! ```
//!
//! Differentiating gives dρ/dp′ = η(−p′)S(−p′)^{N−1}·(ρ(p′) − p′)/denominator,
//! so ρ is strictly increasing while ρ(p′) > p′ and decreasing after: the
//! unique interior maximum sits exactly at the fixed point p* = ρ_N(p*).
//! The fixed-point iteration p ← ρ_N(p) is the primary maximizer for
//! Gaussian strategies; a golden-section search over the same bracket
//! verifies it, and wins if the two ever disagree.

use crate::auction::Withdrawal;
use crate::error::{QError, QResult};
use crate::numeric::{golden, quad};
use crate::strategies::{ensure_n_at_least, Strategy};

/// Absolute tolerance for each profit-intensity integral.
pub const RHO_QUAD_TOL: f64 = 1e-10;
/// Fixed-point step tolerance |p_{j+1} − p_j|.
pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERS: u32 = 200;
/// Golden-section bracket tolerance on the argmax.
pub const GOLDEN_X_TOL: f64 = 1e-8;
/// The two maximizers must agree on ρ* this tightly, or golden-section wins.
pub const METHOD_AGREEMENT_TOL: f64 = 1e-6;

/// ρ_N(p′) together with the two integrals it is the ratio of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfitResult {
    /// numerator/denominator, in log-price units per unit time.
    pub rho: f64,
    /// Expected conditional profit: −∫ q·η·S^{N−1} over the acceptance region.
    pub numerator: f64,
    /// Expected waiting time as printed: 1/N + the acceptance integral.
    pub denominator: f64,
    pub p_prime: Withdrawal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxMethod {
    FixedPoint,
    GoldenSection,
}

/// The maximizer of p′ ↦ ρ_N(p′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProfit {
    pub p_star: f64,
    pub rho_star: f64,
    pub method: MaxMethod,
    pub iterations: u32,
}

/// Evaluate ρ_N(p′) by adaptive quadrature in the log-survival domain.
pub fn rho_seller(eta: &Strategy, n: u32, p_prime: Withdrawal) -> QResult<ProfitResult> {
    ensure_n_at_least(n, 1)?;
    eta.ensure_no_atoms()?;
    let nf = n as f64;
    let (lo, support_hi) = eta.quad_bounds(n);
    let hi = support_hi.min(p_prime.acceptance_cap());
    let (numerator, acceptance) = if hi > lo {
        let weight = |q: f64| {
            let d = eta.density(q).expect("atoms were ruled out above");
            d * ((nf - 1.0) * eta.log_survival(q)).exp()
        };
        let num = -quad::integrate(&|q| q * weight(q), lo, hi, RHO_QUAD_TOL)?;
        let acc = quad::integrate(&weight, lo, hi, RHO_QUAD_TOL)?;
        (num, acc)
    } else {
        (0.0, 0.0) // withdrawal above every possible bid: nothing ever closes
    };
    let denominator = 1.0 / nf + acceptance;
    Ok(ProfitResult {
        rho: numerator / denominator,
        numerator,
        denominator,
        p_prime,
    })
}

/// ρ_N(−∞) through the closed identity: at p′ = −∞ the two integrals are
/// E(𝔮′)/N and 1/N, so ρ collapses to −E(𝔮′)/2 with 𝔮′ the first-order
/// statistic. An independent evaluation path for cross-checking the ratio
/// quadrature.
pub fn rho_limit_identity(eta: &Strategy, n: u32) -> QResult<f64> {
    Ok(-eta.order_stat_mean(n)? / 2.0)
}

/// Maximize p′ ↦ ρ_N(p′).
///
/// Gaussian strategies use the fixed-point iteration p ← ρ_N(p) from p = 0
/// (the contraction argument behind it is Gaussian-specific), cross-checked
/// by golden-section; other strategies go straight to golden-section over
/// the support-derived bracket.
pub fn max_rho(eta: &Strategy, n: u32) -> QResult<MaxProfit> {
    ensure_n_at_least(n, 1)?;
    eta.ensure_no_atoms()?;
    let rho_at = |p: f64| -> QResult<f64> { Ok(rho_seller(eta, n, Withdrawal::Finite(p))?.rho) };

    // ρ varies only while −p′ cuts inside the support: bracket p′ there.
    let (support_lo, support_hi) = eta.quad_bounds(n);
    let bracket = (-support_hi, -support_lo);

    // Quadrature failures surface through a checked cell, since the
    // golden-section callback itself cannot return errors.
    let quad_error = std::cell::Cell::new(None);
    let golden_result = || {
        let g = |p: f64| match rho_at(p) {
            Ok(v) => v,
            Err(e) => {
                quad_error.set(Some(e));
                f64::NEG_INFINITY
            }
        };
        golden::golden_max(&g, bracket.0, bracket.1, GOLDEN_X_TOL)
    };

    if !eta.is_gaussian() {
        let (p_star, rho_star) = golden_result();
        if let Some(e) = quad_error.take() {
            return Err(e);
        }
        return Ok(MaxProfit { p_star, rho_star, method: MaxMethod::GoldenSection, iterations: 0 });
    }

    let mut p = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for j in 1..=FIXED_POINT_MAX_ITERS {
        let next = rho_at(p)?;
        iterations = j;
        let step = (next - p).abs();
        p = next;
        if step <= FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    let rho_fp = rho_at(p)?;

    let (p_gs, rho_gs) = golden_result();
    if let Some(e) = quad_error.take() {
        return Err(e);
    }
    if converged && (rho_fp - rho_gs).abs() <= METHOD_AGREEMENT_TOL {
        Ok(MaxProfit { p_star: p, rho_star: rho_fp, method: MaxMethod::FixedPoint, iterations })
    } else {
        Ok(MaxProfit { p_star: p_gs, rho_star: rho_gs, method: MaxMethod::GoldenSection, iterations })
    }
}

/// max ρ_N over ρ_N(−∞): the dimensionless dispersion-free ratio.
pub fn profit_ratio(eta: &Strategy, n: u32) -> QResult<f64> {
    ensure_n_at_least(n, 2)?; // ρ_1(−∞) = 0 for a centered strategy
    if !eta.is_gaussian() {
        return Err(QError::Domain("profit_ratio is defined for Gaussian strategies".into()));
    }
    let limit = rho_seller(eta, n, Withdrawal::MinusInfinity)?.rho;
    Ok(max_rho(eta, n)?.rho_star / limit)
}

/// The bidder's profit intensity at deterministic withdrawal q′ against
/// N − 1 rivals playing `eta`:
/// [q′ + p′ ≤ 0] · q′ / (1 + S(q′)^{1−N}).
///
/// For N = 1 the denominator is exactly 2 (no rivals: S⁰ ≡ 1) and the
/// intensity is the line q′/2. Where S(q′) = 0 with rivals present, the
/// winning probability vanishes and so does the intensity.
pub fn rho_bidder(eta: &Strategy, n: u32, p_prime: Withdrawal, q_prime: f64) -> QResult<f64> {
    ensure_n_at_least(n, 1)?;
    if !p_prime.admits(q_prime) {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(q_prime / 2.0);
    }
    eta.ensure_no_atoms()?;
    let log_s = eta.log_survival(q_prime);
    if log_s == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let rival_factor = ((1.0 - n as f64) * log_s).exp(); // S^{1−N}, log-domain
    Ok(q_prime / (1.0 + rival_factor))
}

/// Average per-bidder loss intensity −2ρ_N(−∞)/(1 + N). Asserted, not
/// derived: there is no independent evaluation path, so this is formula-only.
pub fn bidder_loss_intensity(rho_inf: f64, n: u32) -> QResult<f64> {
    ensure_n_at_least(n, 1)?;
    Ok(-2.0 * rho_inf / (1.0 + n as f64))
}
