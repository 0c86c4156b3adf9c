//! Golden-section search for a one-dimensional maximum.
//!
//! Used as the derivative-free cross-check on the fixed-point maximizer of
//! the seller's profit intensity: it assumes nothing beyond unimodality on
//! the bracket, so agreement between the two methods is meaningful evidence.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2

/// Maximize `f` on [a, b]; returns (argmax, max). The bracket shrinks by
/// 1/φ per iteration until it is narrower than `x_tol`. Comparison-based
/// search cannot place a smooth maximum more closely than about √ε times
/// the scale of x — the function is flat to rounding noise there — so a
/// tighter `x_tol` buys a stable bracket, not extra digits.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > x_tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
