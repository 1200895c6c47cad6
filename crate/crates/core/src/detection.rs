//! Threshold detection on the received count: detection and false-alarm
//! probabilities, ROC curves and three routes to the area under the ROC.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{HypothesisStats, LinkSample};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{erfc, normal_pdf, phi_cdf, q_inverse, Q_FIT_ALPHA, Q_FIT_BETA, Q_FIT_GAMMA};

pub use crate::special::{q_approx, q_exact};

/// Lowest threshold included in the AUC integral.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerLimit {
    /// Every real threshold; the area under the full ROC curve.
    #[default]
    NegInfinity,
    /// Thresholds `η ≥ 0` only, treating counts as nonnegative.
    Zero,
}

impl LowerLimit {
    pub fn value(self) -> f64 {
        match self {
            LowerLimit::NegInfinity => f64::NEG_INFINITY,
            LowerLimit::Zero => 0.0,
        }
    }
}

/// Probability of deciding 1 when 1 was sent.
pub fn pd(eta: f64, stats: &HypothesisStats) -> Result<f64> {
    stats.ensure_nondegenerate()?;
    Ok(q_exact((eta - stats.mu1) / stats.sigma1()))
}

/// Probability of deciding 1 when 0 was sent.
pub fn pf(eta: f64, stats: &HypothesisStats) -> Result<f64> {
    stats.ensure_nondegenerate()?;
    Ok(q_exact((eta - stats.mu0) / stats.sigma0()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// `(pf, pd)` pairs, thresholds descending.
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
}

impl RocCurve {
    /// Trapezoidal area, closing the curve at `(0, 0)` and `(1, 1)`.
    pub fn trapezoid_area(&self) -> f64 {
        let mut prev = (0.0, 0.0);
        let mut area = 0.0;
        for &p in self.points.iter().chain(std::iter::once(&(1.0, 1.0))) {
            area += (p.0 - prev.0) * (p.1 + prev.1) / 2.0;
            prev = p;
        }
        area
    }
}

/// Range of false-alarm probabilities covered by [`roc`].
pub const ROC_PF_EDGE: f64 = 1e-6;

/// ROC curve with points spaced uniformly in false-alarm probability over
/// `[1e-6, 1 − 1e-6]`.
pub fn roc(stats: &HypothesisStats, n_points: usize) -> Result<RocCurve> {
    stats.ensure_nondegenerate()?;
    if n_points < 2 {
        return Err(Error::InvalidArgument("roc needs at least 2 points".into()));
    }
    let span = 1.0 - 2.0 * ROC_PF_EDGE;
    let thresholds: Vec<f64> = (0..n_points)
        .map(|k| {
            let target = ROC_PF_EDGE + span * k as f64 / (n_points - 1) as f64;
            stats.mu0 + stats.sigma0() * q_inverse(target)
        })
        .collect();
    let points = thresholds
        .iter()
        .map(|&eta| {
            (
                q_exact((eta - stats.mu0) / stats.sigma0()),
                q_exact((eta - stats.mu1) / stats.sigma1()),
            )
        })
        .collect();
    Ok(RocCurve { points, thresholds })
}

/// Half-width, in standard deviations, of the numeric integration window.
const AUC_SPAN_SIGMAS: f64 = 12.0;

pub fn auc_numeric(stats: &HypothesisStats) -> Result<f64> {
    auc_numeric_with(stats, LowerLimit::default())
}

/// AUC by adaptive quadrature; `1 − auc_complement_with(stats, lower)`.
pub fn auc_numeric_with(stats: &HypothesisStats, lower: LowerLimit) -> Result<f64> {
    let (above, miss) = split_integral(stats, lower)?;
    Ok((above - miss).clamp(0.0, 1.0))
}

pub fn auc_complement(stats: &HypothesisStats) -> Result<f64> {
    auc_complement_with(stats, LowerLimit::default())
}

/// `1 − AUC` with full relative accuracy, for hypotheses so well separated
/// that the AUC itself rounds to 1.
pub fn auc_complement_with(stats: &HypothesisStats, lower: LowerLimit) -> Result<f64> {
    let (above, miss) = split_integral(stats, lower)?;
    Ok(((1.0 - above) + miss).clamp(0.0, 1.0))
}

/// Returns `P₀[η > L]` and the complement `∫_L Φ((η−μ₁)/σ₁)·f₀(η) dη`.
/// The integrand is log-concave with its mode in `[μ₀, μ₁]`, so cutting at
/// `μ₀ − 12σ₀` and `max(μ₀ + 12σ₀, μ₁ + 12σ₁)` loses a relative `e^{-72}`.
fn split_integral(stats: &HypothesisStats, lower: LowerLimit) -> Result<(f64, f64)> {
    stats.ensure_nondegenerate()?;
    let (m0, s0, m1, s1) = (stats.mu0, stats.sigma0(), stats.mu1, stats.sigma1());
    let above = q_exact((lower.value() - m0) / s0);
    let lo = (m0 - AUC_SPAN_SIGMAS * s0).max(lower.value());
    let hi = (m0 + AUC_SPAN_SIGMAS * s0).max(m1 + AUC_SPAN_SIGMAS * s1);
    if lo >= hi {
        return Ok((above, 0.0));
    }
    let tol = Tolerance { abs: 0.0, rel: 1e-11, max_intervals: 20_000 };
    let miss = integrate(|eta| phi_cdf((eta - m1) / s1) * normal_pdf(eta, m0, s0), lo, hi, 32, tol);
    Ok((above, miss.value))
}

/// Coefficients of the three-term closed form. Terms 1 and 2 integrate the
/// `x < 0` branch of the Q fit below `μ₁`, term 3 the `x ≥ 0` branch above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucCoefficients {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub d: [f64; 3],
    pub e: [f64; 3],
}

impl AucCoefficients {
    pub fn from_stats(stats: &HypothesisStats) -> Self {
        let (alpha, beta, gamma) = (Q_FIT_ALPHA, Q_FIT_BETA, Q_FIT_GAMMA);
        let (m0, m1, v0, v1) = (stats.mu0, stats.mu1, stats.var0, stats.var1);
        let s1 = stats.sigma1();
        let a1 = 0.5 / v0;
        let b1 = -m0 * a1;
        let c1 = m0 * m0 * a1;
        let a2 = alpha / v1 + a1;
        let b2 = -(alpha * m1 + beta * s1 / 2.0) / v1 + b1;
        let c2 = (alpha * m1 + beta * s1) * m1 / v1 + c1 + gamma;
        let a3 = a2;
        let b3 = -(alpha * m1 - beta * s1 / 2.0) / v1 + b1;
        let c3 = (alpha * m1 - beta * s1) * m1 / v1 + c1 + gamma;
        AucCoefficients {
            a: [a1, a2, a3],
            b: [b1, b2, b3],
            c: [c1, c2, c3],
            d: [1.0, 1.0, 0.0],
            e: [0.0, 0.0, a3.sqrt() * m1],
        }
    }
}

pub fn auc_closed_form(stats: &HypothesisStats) -> Result<f64> {
    auc_closed_form_with(stats, LowerLimit::default())
}

/// Closed-form AUC from the exponential Q fit.
///
/// Each term is `±(1/√a)·exp((b²−ac)/a)·[erfc(√a·lo + b/√a) − erfc(√a·hi + b/√a)]`
/// over its threshold interval. With `LowerLimit::Zero` this is the
/// coefficient table as given (`e₁ = e₂ = 0`, `e₃ = √a₃·μ₁`, and `d₃ = 0`
/// sending the upper limit to infinity).
pub fn auc_closed_form_with(stats: &HypothesisStats, lower: LowerLimit) -> Result<f64> {
    stats.ensure_nondegenerate()?;
    let k = AucCoefficients::from_stats(stats);
    let m1 = stats.mu1;
    let low = lower.value();
    let intervals = [(low, m1), (low, m1), (low.max(m1), f64::INFINITY)];
    let sum: f64 = (0..3)
        .map(|i| {
            let (lo, hi) = intervals[i];
            if lo >= hi {
                return 0.0;
            }
            let ra = k.a[i].sqrt();
            let shift = k.b[i] / ra;
            let arg = |x: f64| if x.is_infinite() { x } else { ra * x + shift };
            let sign = if i == 1 { -1.0 } else { 1.0 };
            let scale = ((k.b[i] * k.b[i] - k.a[i] * k.c[i]) / k.a[i]).exp();
            sign / ra * scale * (erfc(arg(lo)) - erfc(arg(hi)))
        })
        .sum();
    Ok((sum / (2.0 * SQRT_2 * stats.sigma0())).clamp(0.0, 1.0))
}

/// Area under the empirical ROC: the fraction of (bit 1, bit 0) sample
/// pairs ranked correctly, ties counting one half.
pub fn auc_empirical(samples: &[LinkSample]) -> Result<f64> {
    let mut sorted: Vec<(f64, u8)> = samples.iter().map(|s| (s.y, s.true_bit)).collect();
    let ones = sorted.iter().filter(|s| s.1 == 1).count();
    let zeros = sorted.len() - ones;
    if ones == 0 || zeros == 0 {
        return Err(Error::SingleClass);
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j].0 == sorted[i].0 {
            j += 1;
        }
        // Ranks i+1..=j share their average.
        let mid = (i + 1 + j) as f64 / 2.0;
        let hits = sorted[i..j].iter().filter(|s| s.1 == 1).count();
        rank_sum += mid * hits as f64;
        i = j;
    }
    let (n1, n0) = (ones as f64, zeros as f64);
    Ok((rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0))
}
