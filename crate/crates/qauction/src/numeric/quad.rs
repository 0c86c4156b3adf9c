//! Adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! The profit-intensity integrands are smooth within a known truncation
//! window but develop a sharp concentration near −√(2 ln N)·σ as N grows, so
//! a fixed rule is hopeless while bisection with a G7/K15 error estimate
//! converges in a handful of splits. The interval is pre-split into equal
//! panels before adapting: a feature much narrower than one node spacing is
//! invisible to the rule and would otherwise be accepted at zero estimated
//! error. Tolerances are absolute; the budget is split evenly across panels
//! and bisections so the accepted-interval error estimates sum to at most
//! the request.

use crate::error::{QError, QResult};

// Kronrod-15 abscissae on [0, 1] side of the symmetric rule (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss-7 weights for the nodes at odd XGK indices (1, 3, 5) plus the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

/// Top-level panel count; narrows the rule's blind spot to features below
/// roughly 1/200 of the interval, far sharper than the ~1/90 concentration
/// the integrands reach at the largest N the quadrature path serves.
const INITIAL_PANELS: u32 = 16;

/// One (7, 15) evaluation over [a, b]: returns (Kronrod value, |K − G|).
fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for i in 0..7 {
        let offset = half * XGK[i];
        let pair = f(center - offset) + f(center + offset);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// ∫_a^b f, adaptively bisected until the per-interval error estimates sum
/// below `abs_tol`. Fails with the achieved tolerance attached when the
/// depth cap is hit first.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> QResult<f64> {
    if !(a < b) {
        return Ok(0.0);
    }
    let mut achieved = 0.0;
    let mut converged = true;
    let panel_tol = abs_tol / INITIAL_PANELS as f64;
    let mut value = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + (b - a) * i as f64 / INITIAL_PANELS as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + (b - a) * (i + 1) as f64 / INITIAL_PANELS as f64
        };
        value += bisect(f, lo, hi, panel_tol, 0, &mut achieved, &mut converged);
    }
    if converged {
        Ok(value)
    } else {
        Err(QError::QuadratureFailure {
            achieved,
            requested: abs_tol,
        })
    }
}

fn bisect<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    achieved: &mut f64,
    converged: &mut bool,
) -> f64 {
    let (value, err) = kronrod_15(f, a, b);
    if err <= tol || depth >= MAX_DEPTH {
        if err > tol {
            *converged = false;
        }
        *achieved += err;
        return value;
    }
    let mid = 0.5 * (a + b);
    bisect(f, a, mid, 0.5 * tol, depth + 1, achieved, converged)
        + bisect(f, mid, b, 0.5 * tol, depth + 1, achieved, converged)
}
