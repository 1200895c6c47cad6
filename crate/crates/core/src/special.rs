//! Error function, Gaussian tail and the exponential Q-function fit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Beyond this argument erfc is below 1e-318 and is reported as 0.
pub const ERFC_CUTOFF: f64 = 27.0;

/// Coefficients of the piecewise exponential fit to the Q-function.
pub const Q_FIT_ALPHA: f64 = 0.3842;
pub const Q_FIT_BETA: f64 = 0.7640;
pub const Q_FIT_GAMMA: f64 = 0.6964;

/// Complementary error function; `erfc(+inf) = 0`, `erfc(-inf) = 2`.
pub fn erfc(x: f64) -> f64 {
    if x > ERFC_CUTOFF {
        0.0
    } else {
        libm::erfc(x)
    }
}

/// Gaussian tail probability `P[Z > x]`.
pub fn q_exact(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF.
pub fn phi_cdf(x: f64) -> f64 {
    q_exact(-x)
}

/// Exponential approximation of `Q(x)`.
pub fn q_approx(x: f64) -> f64 {
    if x >= 0.0 {
        (-Q_FIT_ALPHA * x * x - Q_FIT_BETA * x - Q_FIT_GAMMA).exp()
    } else {
        1.0 - (-Q_FIT_ALPHA * x * x + Q_FIT_BETA * x - Q_FIT_GAMMA).exp()
    }
}

pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

/// Inverse of [`q_exact`] on `(0, 1)`.
///
/// Rational starting point (Acklam) followed by Halley steps on the exact
/// tail, which brings the result to full double precision.
pub fn q_inverse(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "q_inverse needs p in (0, 1), got {p}");
    // Work with the lower tail: Q^{-1}(p) = -Φ^{-1}(p).
    let mut x = -acklam(p);
    for _ in 0..3 {
        let e = q_exact(x) - p;
        let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if pdf == 0.0 {
            break;
        }
        // Q' = -pdf, Q'' = x·pdf.
        let u = -e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;
    if p < LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}
