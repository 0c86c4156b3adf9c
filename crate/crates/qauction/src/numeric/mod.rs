//! Shared numerical kernels: normal-distribution functions, adaptive
//! quadrature, and one-dimensional search.

pub mod golden;
pub mod normal;
pub mod quad;

/// ln Σ exp(xᵢ), stable against both overflow and all-(−∞) inputs.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max; // all −∞ (empty sums) or a +∞ dominates either way
    }
    let sum: f64 = terms.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}
