//! Numerics for English auctions in which every participant plays a
//! probability measure over log-prices instead of a single quote.
//!
//! A bidder's strategy is a density η(q) of the log variable q = −ln c; the
//! seller plays a density of the log withdrawal price p, and a transaction
//! requires the rationality condition [q + p ≤ 0]. Out of these the crate
//! builds, level by level:
//!
//! * [`strategies`] — the measure types (Gaussian, point mass, mixtures,
//!   tabulated) with survival functions kept accurate in the log domain,
//!   plus the two-dimensional joint (price, bid) densities in
//!   [`strategies2d`];
//! * [`auction`] — transaction and winner measures for heterogeneous and
//!   identical bidders;
//! * [`profit`] — seller and bidder profit intensities, their quadrature
//!   evaluation, and the maximization of the seller's intensity over the
//!   withdrawal price (fixed point and golden section);
//! * [`asymptotics`] — the Gumbel limit of the winning bid for many
//!   bidders, with the norming constants, the closed large-N profit
//!   asymptotic, and the logarithmic fit;
//! * [`montecarlo`] — a seedable, deterministically parallel simulator
//!   validating the analytic path and covering joint strategies.
//!
//! All prices live in log space throughout; conversion to multiplicative
//! prices is a display concern and happens only at the command line.

pub mod asymptotics;
pub mod auction;
pub mod error;
pub mod montecarlo;
pub mod numeric;
pub mod profit;
pub mod strategies;
pub mod strategies2d;

pub use asymptotics::{
    asymptotic_max_rho, gumbel_cdf, gumbel_sup_distance, log_fit, norming_constants,
    rescaled_winner_cdf, NormingConstants, EULER_GAMMA,
};
pub use auction::{
    acceptance_probability, dominant_bidder_measure, rationality, transaction_density,
    winner_measure_identical, AuctionConfig, Withdrawal,
};
pub use error::{QError, QResult};
pub use montecarlo::{
    empirical_gumbel_distance, estimate_rho_seller, simulate_config, simulate_joint,
    simulate_once, AuctionOutcome, BidderSummary, ConfigReport, JointReport, JointSeller,
    SimulationReport,
};
pub use profit::{
    bidder_loss_intensity, max_rho, profit_ratio, rho_bidder, rho_limit_identity, rho_seller,
    MaxMethod, MaxProfit, ProfitResult,
};
pub use strategies::{Strategy, Tabulated};
pub use strategies2d::JointStrategy2D;
