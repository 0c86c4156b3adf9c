use thiserror::Error;

/// Everything that can go wrong inside the analytic (non-Monte-Carlo) paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// A pointwise density was requested from a strategy that carries an
    /// atom there (a Dirac, or a mixture containing one).
    #[error("strategy has no pointwise density at the requested point")]
    NoPointwiseDensity,

    /// The quadrature path cannot rank bidders: another bidder holds an
    /// atom exactly at the evaluation point, so the winner is ambiguous
    /// with positive probability. The Monte Carlo path resolves such ties
    /// uniformly at random instead.
    #[error("tie ambiguity: a rival bidder has an atom exactly at q = {q}")]
    TieAmbiguity { q: f64 },

    /// Construction-time validation failure (bad sigma, weights, grid, ...).
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    /// An argument broke a documented precondition (N out of range, wrong
    /// strategy family, malformed configuration).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested absolute tolerance; the tolerance it did achieve is
    /// attached for diagnosis.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureFailure { achieved: f64, requested: f64 },
}

pub type QResult<T> = Result<T, QError>;
