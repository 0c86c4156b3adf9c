//! Extreme-value behaviour of the winning log-price for large N.
//!
//! The minimum 𝔮′ of N standard normal bids concentrates near −√(2 ln N);
//! rescaled with the classical norming constants for a normal maximum,
//! X_N = a_N·(−𝔮′) + b_N, its law tends to the Gumbel distribution. (The
//! constants norm a maximum, and −𝔮′ is the maximum of the negated bids,
//! which is why 𝔮′ enters negated.) The same concentration yields the
//! closed asymptotic for the seller's maximal profit intensity and the
//! two-parameter logarithmic fit that tracks it from small N on.

use crate::error::{QError, QResult};
use crate::numeric::normal::std_log_survival;

/// Euler–Mascheroni constant, hard-coded to full double precision: its
/// limit definition converges far too slowly to evaluate on the fly.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Grid on which the exact-vs-Gumbel sup distance is evaluated.
pub const SUP_GRID_LO: f64 = -5.0;
pub const SUP_GRID_HI: f64 = 10.0;
pub const SUP_GRID_POINTS: usize = 2001;

/// The norming pair for N bids: a_N = √(2 ln N),
/// b_N = ½(ln 4π + ln ln N) − 2 ln N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstants {
    pub a_n: f64,
    pub b_n: f64,
    pub n: u32,
}

/// Requires N ≥ 2 (ln ln N must exist; ln ln 2 < 0 is admissible).
pub fn norming_constants(n: u32) -> QResult<NormingConstants> {
    if n < 2 {
        return Err(QError::Domain(format!("norming constants need N ≥ 2, got {n}")));
    }
    let ln_n = (n as f64).ln();
    Ok(NormingConstants {
        a_n: (2.0 * ln_n).sqrt(),
        b_n: 0.5 * ((4.0 * std::f64::consts::PI).ln() + ln_n.ln()) - 2.0 * ln_n,
        n,
    })
}

/// The Gumbel cumulative distribution function exp(−e^{−x}).
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Large-N asymptotic of the maximal seller profit intensity (units of σ):
/// √(ln N / 2) + (2γ − ln 4π − ln ln N)/(4√(2 ln N)). Requires N ≥ 3 so the
/// ln ln N correction is meaningful.
pub fn asymptotic_max_rho(n: u32) -> QResult<f64> {
    if n < 3 {
        return Err(QError::Domain(format!("the asymptotic needs N ≥ 3, got {n}")));
    }
    let ln_n = (n as f64).ln();
    Ok((ln_n / 2.0).sqrt()
        + (2.0 * EULER_GAMMA - (4.0 * std::f64::consts::PI).ln() - ln_n.ln())
            / (4.0 * (2.0 * ln_n).sqrt()))
}

/// The empirical two-parameter fit 0.21·ln N + 0.3 to the maximal profit
/// intensity (natural logarithm). Defined for N ≥ 1.
pub fn log_fit(n: u32) -> f64 {
    0.21 * (n as f64).ln() + 0.3
}

/// Exact CDF of the rescaled winner X_N = a_N·(−𝔮′) + b_N, from the
/// identity P(𝔮′ > q) = S(q)^N: F_N(x) = S((b_N − x)/a_N)^N, with the
/// power taken in the log domain.
pub fn rescaled_winner_cdf(n: u32, x: f64) -> QResult<f64> {
    let c = norming_constants(n)?;
    Ok((n as f64 * std_log_survival((c.b_n - x) / c.a_n)).exp())
}

/// sup |F_N − Gumbel| over the fixed evaluation grid. Strictly decreasing
/// in N is the convergence check the exact path provides.
pub fn gumbel_sup_distance(n: u32) -> QResult<f64> {
    let mut sup: f64 = 0.0;
    for i in 0..SUP_GRID_POINTS {
        let x = SUP_GRID_LO + (SUP_GRID_HI - SUP_GRID_LO) * i as f64 / (SUP_GRID_POINTS - 1) as f64;
        sup = sup.max((rescaled_winner_cdf(n, x)? - gumbel_cdf(x)).abs());
    }
    Ok(sup)
}
