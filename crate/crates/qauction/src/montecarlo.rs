//! Seedable simulation of q-auctions, validating the quadrature results and
//! covering the two-dimensional mixed strategies the analytic path cannot.
//!
//! Determinism contract: trials are partitioned into fixed-size batches and
//! batch `i` draws from stream `i` of a ChaCha8 generator keyed by the
//! caller's seed. Batch results are reduced in index order, so every report
//! is bit-identical for a given (inputs, seed) regardless of how many
//! threads rayon decides to use. Within a trial the draw order is: bidders
//! in index order, then the seller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{gumbel_cdf, norming_constants};
use crate::auction::{rationality, AuctionConfig, Withdrawal};
use crate::error::{QError, QResult};
use crate::strategies::Strategy;
use crate::strategies2d::JointStrategy2D;

/// Trials per RNG sub-stream. Small enough that short runs still spread
/// across cores, large enough that stream setup is negligible.
const BATCH: u64 = 16_384;

/// Below this the delta-method error bars are not worth printing.
const MIN_TRIALS: u64 = 1_000;

/// One simulated auction: every bidder bids, the lowest log-price wins
/// (uniform tie-break), and the deal happens iff the rationality condition
/// [𝔮′ + 𝔭 ≤ 0] holds against the seller's drawn withdrawal price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionOutcome {
    pub winner: usize,
    pub q_win: f64,
    pub accomplished: bool,
    pub p_seller: f64,
}

/// Summary of a simulation run. `rho_estimate` is the empirical profit
/// intensity: mean of −[deal]·𝔮′ over trials divided by (1 + deal_rate) —
/// the sampled numerator and acceptance probability of the seller's profit
/// functional, with the common 1/N factors cancelled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub n_trials: u64,
    pub deal_rate: f64,
    pub mean_conditional_profit: f64,
    pub rho_estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

/// Per-bidder tallies from a heterogeneous simulation: how often this
/// bidder won an accomplished deal, and (2-D strategies only) the mean log
/// resale margin p_k + 𝔮′ over those wins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidderSummary {
    pub deal_freq: f64,
    pub mean_resale_margin: f64,
}

/// Report for a heterogeneous one-dimensional configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigReport {
    pub report: SimulationReport,
    pub bidder_deal_freq: Vec<f64>,
}

/// Report for two-dimensional (price, bid) strategies. On top of the scalar
/// summary it carries each bidder's deal frequency and resale margin, and
/// the unconditional mean of the winner's planned resale log-price.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointReport {
    pub report: SimulationReport,
    pub per_bidder: Vec<BidderSummary>,
    pub mean_winner_logprice: f64,
}

/// The seller side of a two-dimensional auction: either a plain price
/// strategy or a joint density whose p-component is the withdrawal price.
#[derive(Debug, Clone)]
pub enum JointSeller {
    Price(Strategy),
    Joint(JointStrategy2D),
}

impl JointSeller {
    fn sample_price<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JointSeller::Price(s) => s.sample(rng),
            JointSeller::Joint(j) => j.sample(rng).0,
        }
    }
}

/// Running sums for the ratio estimator. Because the profit variable
/// X = −[deal]·𝔮′ vanishes off deals and the deal indicator is 0/1, the
/// cross products collapse: ΣXD = ΣX and ΣD² = ΣD, so four accumulators
/// carry the full empirical covariance.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: u64,
    deals: u64,
    sx: f64,
    sxx: f64,
}

impl Sums {
    fn record(&mut self, q_win: f64, deal: bool) {
        self.n += 1;
        if deal {
            self.deals += 1;
            self.sx += -q_win;
            self.sxx += q_win * q_win;
        }
    }

    fn merge(mut self, other: Sums) -> Sums {
        self.n += other.n;
        self.deals += other.deals;
        self.sx += other.sx;
        self.sxx += other.sxx;
        self
    }

    /// Delta-method report for rho = X̄ / (1 + D̄). The gradient is
    /// (1/(1+D̄), −X̄/(1+D̄)²) and the covariance of (X, D) is estimated
    /// with (n−1) denominators.
    fn report(&self, seed: u64) -> SimulationReport {
        let n = self.n as f64;
        let x_bar = self.sx / n;
        let d_bar = self.deals as f64 / n;
        let denom = 1.0 + d_bar;
        let rho = x_bar / denom;

        let nm1 = n - 1.0;
        let s_xx = (self.sxx - n * x_bar * x_bar) / nm1;
        let s_dd = (self.deals as f64 - n * d_bar * d_bar) / nm1;
        let s_xd = (self.sx - n * x_bar * d_bar) / nm1;
        let gx = 1.0 / denom;
        let gd = -x_bar / (denom * denom);
        let var = (gx * gx * s_xx + 2.0 * gx * gd * s_xd + gd * gd * s_dd) / n;

        SimulationReport {
            n_trials: self.n,
            deal_rate: d_bar,
            mean_conditional_profit: if self.deals > 0 { self.sx / self.deals as f64 } else { 0.0 },
            rho_estimate: rho,
            std_error: var.max(0.0).sqrt(),
            seed,
        }
    }
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn ensure_trials(n_trials: u64) -> QResult<()> {
    if n_trials < MIN_TRIALS {
        return Err(QError::Domain(format!(
            "simulation needs at least {MIN_TRIALS} trials, got {n_trials}"
        )));
    }
    Ok(())
}

/// Plays one auction: draws every bidder's log variable, then the seller's
/// withdrawal price, and settles the winner by lowest bid. Exact ties are
/// broken uniformly by reservoir sampling, so the generator is consumed
/// only when a tie actually occurs.
pub fn simulate_once<R: Rng + ?Sized>(cfg: &AuctionConfig, rng: &mut R) -> AuctionOutcome {
    let mut winner = 0usize;
    let mut q_win = f64::INFINITY;
    let mut ties = 0u32;
    for (k, bidder) in cfg.bidders.iter().enumerate() {
        let q = bidder.sample(rng);
        if q < q_win {
            winner = k;
            q_win = q;
            ties = 1;
        } else if q == q_win {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                winner = k;
            }
        }
    }
    let p_seller = cfg.seller.sample(rng);
    AuctionOutcome { winner, q_win, accomplished: rationality(q_win, p_seller), p_seller }
}

/// Estimates the seller's profit intensity for N identical bidders against
/// a fixed withdrawal price by plain Monte Carlo over the first order
/// statistic. The error bar is the delta-method standard error of the
/// ratio estimator, with the numerator/indicator correlation kept.
pub fn estimate_rho_seller(
    eta: &Strategy,
    n: u32,
    p_prime: Withdrawal,
    n_trials: u64,
    seed: u64,
) -> QResult<SimulationReport> {
    crate::strategies::ensure_n_at_least(n, 1)?;
    ensure_trials(n_trials)?;

    let sums = fold_trials(n_trials, seed, Sums::default(), Sums::merge, |rng| {
        let mut q_min = f64::INFINITY;
        for _ in 0..n {
            q_min = q_min.min(eta.sample(rng));
        }
        (q_min, p_prime.admits(q_min))
    });
    Ok(sums.report(seed))
}

/// Simulates a heterogeneous configuration and tallies, besides the scalar
/// report, how often each bidder wins an accomplished deal.
pub fn simulate_config(
    cfg: &AuctionConfig,
    n_trials: u64,
    seed: u64,
) -> QResult<ConfigReport> {
    ensure_trials(n_trials)?;
    let n_bidders = cfg.n_bidders();

    #[derive(Clone)]
    struct Acc {
        sums: Sums,
        wins: Vec<u64>,
    }
    let zero = Acc { sums: Sums::default(), wins: vec![0; n_bidders] };

    let acc = parallel_fold(
        n_trials,
        seed,
        zero,
        |mut a, b| {
            a.sums = a.sums.merge(b.sums);
            for (x, y) in a.wins.iter_mut().zip(&b.wins) {
                *x += y;
            }
            a
        },
        |acc, rng| {
            let out = simulate_once(cfg, rng);
            acc.sums.record(out.q_win, out.accomplished);
            if out.accomplished {
                acc.wins[out.winner] += 1;
            }
        },
    );

    Ok(ConfigReport {
        report: acc.sums.report(seed),
        bidder_deal_freq: acc.wins.iter().map(|&w| w as f64 / n_trials as f64).collect(),
    })
}

/// Simulates bidders holding joint (price, bid) strategies. The winner is
/// still the lowest q; the extra tallies track each bidder's resale margin
/// p_k + 𝔮′ on accomplished wins and the winner's unconditional planned
/// resale log-price.
pub fn simulate_joint(
    bidders: &[JointStrategy2D],
    seller: &JointSeller,
    n_trials: u64,
    seed: u64,
) -> QResult<JointReport> {
    if bidders.is_empty() {
        return Err(QError::Domain("a joint auction needs at least one bidder".into()));
    }
    ensure_trials(n_trials)?;

    #[derive(Clone)]
    struct Acc {
        sums: Sums,
        wins: Vec<u64>,
        margin: Vec<f64>,
        winner_p: f64,
    }
    let zero = Acc {
        sums: Sums::default(),
        wins: vec![0; bidders.len()],
        margin: vec![0.0; bidders.len()],
        winner_p: 0.0,
    };

    let acc = parallel_fold(
        n_trials,
        seed,
        zero,
        |mut a, b| {
            a.sums = a.sums.merge(b.sums);
            for (x, y) in a.wins.iter_mut().zip(&b.wins) {
                *x += y;
            }
            for (x, y) in a.margin.iter_mut().zip(&b.margin) {
                *x += y;
            }
            a.winner_p += b.winner_p;
            a
        },
        |acc, rng| {
            let mut winner = 0usize;
            let mut q_win = f64::INFINITY;
            let mut p_win = 0.0;
            let mut ties = 0u32;
            for (k, bidder) in bidders.iter().enumerate() {
                let (p, q) = bidder.sample(rng);
                if q < q_win {
                    winner = k;
                    q_win = q;
                    p_win = p;
                    ties = 1;
                } else if q == q_win {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        winner = k;
                        p_win = p;
                    }
                }
            }
            let p_seller = seller.sample_price(rng);
            let deal = rationality(q_win, p_seller);
            acc.sums.record(q_win, deal);
            acc.winner_p += p_win;
            if deal {
                acc.wins[winner] += 1;
                acc.margin[winner] += p_win + q_win;
            }
        },
    );

    let per_bidder = acc
        .wins
        .iter()
        .zip(&acc.margin)
        .map(|(&w, &m)| BidderSummary {
            deal_freq: w as f64 / n_trials as f64,
            mean_resale_margin: if w > 0 { m / w as f64 } else { 0.0 },
        })
        .collect();

    Ok(JointReport {
        report: acc.sums.report(seed),
        per_bidder,
        mean_winner_logprice: acc.winner_p / n_trials as f64,
    })
}

/// Kolmogorov–Smirnov distance between the rescaled simulated winner
/// a_N·(−𝔮′) + b_N over standard-normal bids and the Gumbel limit law.
pub fn empirical_gumbel_distance(n: u32, n_trials: u64, seed: u64) -> QResult<f64> {
    let c = norming_constants(n)?;
    if n_trials == 0 {
        return Err(QError::Domain("the KS distance needs at least one trial".into()));
    }

    let mut samples = parallel_fold(
        n_trials,
        seed,
        Vec::with_capacity(n_trials as usize),
        |mut a: Vec<f64>, b| {
            a.extend_from_slice(&b);
            a
        },
        |acc, rng| {
            let mut q_min = f64::INFINITY;
            for _ in 0..n {
                let x: f64 = rng.sample(StandardNormal);
                q_min = q_min.min(x);
            }
            acc.push(c.a_n * -q_min + c.b_n);
        },
    );

    samples.sort_unstable_by(f64::total_cmp);
    let m = samples.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = gumbel_cdf(x);
        ks = ks.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    Ok(ks)
}

/// Deterministic parallel reduction: splits `n_trials` into BATCH-sized
/// chunks, runs `body` once per trial on the chunk's own RNG stream, and
/// merges chunk accumulators in batch order.
fn parallel_fold<T, Body>(
    n_trials: u64,
    seed: u64,
    zero: T,
    merge: impl Fn(T, T) -> T,
    body: Body,
) -> T
where
    T: Clone + Send + Sync,
    Body: Fn(&mut T, &mut ChaCha8Rng) + Sync,
{
    let partials: Vec<T> = (0..n_trials.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let mut acc = zero.clone();
            for _ in 0..BATCH.min(n_trials - b * BATCH) {
                body(&mut acc, &mut rng);
            }
            acc
        })
        .collect();
    partials.into_iter().fold(zero, merge)
}

/// Scalar-only variant of [`parallel_fold`] for the common case where a
/// trial reduces to (winning q, deal indicator).
fn fold_trials(
    n_trials: u64,
    seed: u64,
    zero: Sums,
    merge: fn(Sums, Sums) -> Sums,
    trial: impl Fn(&mut ChaCha8Rng) -> (f64, bool) + Sync,
) -> Sums {
    parallel_fold(n_trials, seed, zero, merge, |acc, rng| {
        let (q, deal) = trial(rng);
        acc.record(q, deal);
    })
}
