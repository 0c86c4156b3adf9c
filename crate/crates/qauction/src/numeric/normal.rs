//! Standard-normal density, survival, and log-survival kernels.
//!
//! Everything downstream (order statistics, profit intensities, Gumbel
//! rescaling) reduces to the survival function S(z) = P(Z > z) of a standard
//! normal and its logarithm. The log form is the load-bearing one: winner
//! measures need S(z)^{N−1} for N up to ~1e6, which only survives in the
//! exponent domain.

use std::f64::consts::PI;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Where the direct `ln(erfc)` evaluation hands over to the asymptotic tail
/// series. Below this |z| the erfc path is exact to rounding; above it the
/// Mills-ratio series is accurate to ~6e-10 absolute in the log (and the
/// survival itself is < 7e-16, so the linear-domain error is far below 1e-12).
const TAIL_CROSSOVER: f64 = 8.0;

/// φ(z), the standard normal density.
pub fn std_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// S(z) = P(Z > z) = erfc(z/√2)/2.
pub fn std_survival(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// ln S(z), accurate over the whole real line.
///
/// Three regimes:
/// * z < −8: S(z) = 1 − S(−z) with S(−z) tiny, so `ln_1p(−S(−z))` keeps the
///   sub-1e-16 resolution a plain `ln(S)` would round away;
/// * |z| ≤ 8: `ln` of the erfc evaluation, which has full relative accuracy
///   there;
/// * z > 8: Mills-ratio asymptotic series,
///   ln S(z) = −z²/2 − ln z − ln √(2π) + ln Σ_k (−1)^k (2k−1)!!/z^{2k},
///   truncated where the alternating terms stop improving.
pub fn std_log_survival(z: f64) -> f64 {
    if z < -TAIL_CROSSOVER {
        libm::log1p(-std_survival(-z))
    } else if z <= TAIL_CROSSOVER {
        std_survival(z).ln()
    } else {
        // (2k−1)!! for k = 0..9; the k=9 term at z=8 is ~2e-9 and the series
        // alternates, so truncation error stays below ~6e-10 in the log.
        const DOUBLE_FACTORIALS: [f64; 10] = [
            1.0, 1.0, 3.0, 15.0, 105.0, 945.0, 10.395e3, 135.135e3, 2.027025e6, 34.459425e6,
        ];
        let inv_z2 = 1.0 / (z * z);
        let mut term = 1.0; // (−1/z²)^k, carries the alternating sign
        let mut series = 1.0;
        for &fac in DOUBLE_FACTORIALS.iter().skip(1) {
            term *= -inv_z2;
            series += fac * term;
        }
        -0.5 * z * z - z.ln() - LN_SQRT_2PI + series.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // High-precision reference values (40-digit erfc, rounded here).
    const LN_S_10: f64 = -53.231_285_150_512_47;
    const LN_S_12: f64 = -75.410_673_001_568_796;
    const LN_S_20: f64 = -203.917_155_371_097_26;
    const LN_S_NEG_10: f64 = -7.619_853_024_160_526e-24;
    const LN_S_NEG_8_5: f64 = -9.479_534_822_203_318e-18;

    #[test]
    fn survival_matches_symmetry_and_midpoint() {
        assert_abs_diff_eq!(std_survival(0.0), 0.5, epsilon = 1e-16);
        for z in [-3.0, -1.0, -0.25, 0.5, 2.0] {
            assert_abs_diff_eq!(std_survival(z) + std_survival(-z), 1.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(std_survival(1.0), 0.158_655_253_931_457_07, epsilon = 1e-15);
    }

    #[test]
    fn log_survival_tail_series_matches_reference() {
        assert_abs_diff_eq!(std_log_survival(10.0), LN_S_10, epsilon = 5e-9);
        assert_abs_diff_eq!(std_log_survival(12.0), LN_S_12, epsilon = 1e-9);
        assert_abs_diff_eq!(std_log_survival(20.0), LN_S_20, epsilon = 1e-10);
    }

    #[test]
    fn log_survival_left_tail_keeps_subnormal_resolution() {
        // ln S(−10) ≈ −7.6e-24: a plain ln(survival) would round to 0.
        let ls = std_log_survival(-10.0);
        assert!(ls < 0.0);
        assert_abs_diff_eq!(ls, LN_S_NEG_10, epsilon = 1e-27);
        assert_abs_diff_eq!(std_log_survival(-8.5), LN_S_NEG_8_5, epsilon = 1e-21);
    }

    #[test]
    fn log_survival_seam_is_continuous() {
        // The erfc→series handover at z = 8 may jump by at most the series
        // truncation error.
        let below = std_log_survival(7.999_9);
        let above = std_log_survival(8.000_1);
        let true_below = -35.012_625_028_031_701;
        let true_above = -35.014_249_301_654_15;
        assert_abs_diff_eq!(below, true_below, epsilon = 1e-9);
        assert_abs_diff_eq!(above, true_above, epsilon = 1e-9);
    }

    #[test]
    fn exp_of_log_survival_agrees_in_linear_domain() {
        for z in [-8.0, -4.0, -1.0, 0.0, 1.0, 3.0, 6.0, 8.0] {
            let diff = (std_log_survival(z).exp() - std_survival(z)).abs();
            assert!(diff <= 1e-12, "z={z}: diff={diff:e}");
        }
    }
}
