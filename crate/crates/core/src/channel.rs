//! Closed-form channel quantities for one and two absorbing receivers.
//!
//! The two-receiver hitting probability is a series whose `n`-th term
//! accounts for molecules that bounce `n` times between the receivers'
//! anchor points before being absorbed. Terms decay geometrically with ratio
//! `a²/(R_ij·R_ji)` on top of the erfc decay.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{derive_geometry, Far, FarGeometry};
use crate::scenario::{Scenario, Vec3};
use crate::special::erfc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Summation stops once a term's magnitude falls below this.
    pub term_floor: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            term_floor: 1e-16,
            max_terms: 200,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.term_floor > 0.0) || self.max_terms < 1 {
            return Err(Error::InvalidArgument(
                "series config needs term_floor > 0 and max_terms >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a truncated series evaluation. `converged == false` means the
/// term cap was hit before the floor; the value is still returned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Single-receiver hitting probability `(a/r)·erfc((r−a)/√(4Dt))`.
pub fn p1_hit(t: f64, radius: f64, r: f64, diffusion: f64) -> Result<f64> {
    if r <= radius {
        return Err(Error::Geometry(format!(
            "radial distance {r} must exceed radius {radius}"
        )));
    }
    Ok(p1_unchecked(t, radius, r, diffusion))
}

fn p1_unchecked(t: f64, radius: f64, r: f64, diffusion: f64) -> f64 {
    if t <= 0.0 || diffusion <= 0.0 {
        return 0.0;
    }
    radius / r * erfc((r - radius) / (4.0 * diffusion * t).sqrt())
}

pub fn p1_eventual(radius: f64, r: f64) -> f64 {
    radius / r
}

fn coupling_denominator(geom: &FarGeometry) -> Result<f64> {
    let a = geom.radius;
    let den = geom.r12 * geom.r21 - a * a;
    if den <= 0.0 {
        return Err(Error::Geometry(format!(
            "R12·R21 = {} does not exceed a² = {}",
            geom.r12 * geom.r21,
            a * a
        )));
    }
    Ok(den)
}

/// Fraction of molecules eventually absorbed by `far` with the other
/// receiver present.
pub fn p2_eventual(geom: &FarGeometry, far: Far) -> Result<f64> {
    geom.ensure_overlap_free()?;
    let den = coupling_denominator(geom)?;
    let a = geom.radius;
    let (ri, rj) = (geom.radial(far), geom.radial(far.other()));
    let (rij, rji) = (geom.r_ij(far), geom.r_ji(far));
    Ok(a * rij * (rji / ri - a / rj) / den)
}

/// Eventual-probability loss at `far` caused by the other receiver.
pub fn reduction_eventual(geom: &FarGeometry, far: Far) -> Result<f64> {
    geom.ensure_overlap_free()?;
    let den = coupling_denominator(geom)?;
    let a = geom.radius;
    let (ri, rj) = (geom.radial(far), geom.radial(far.other()));
    Ok(a * a * (geom.r_ij(far) / rj - a / ri) / den)
}

/// Two-receiver channel: geometry, diffusion coefficient and series settings.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    geom: FarGeometry,
    diffusion: f64,
    series: SeriesConfig,
}

impl Channel {
    pub fn new(geom: FarGeometry, diffusion: f64, series: SeriesConfig) -> Result<Self> {
        geom.ensure_overlap_free()?;
        series.validate()?;
        if !(diffusion >= 0.0) || !diffusion.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "diffusion coefficient must be finite and >= 0, got {diffusion}"
            )));
        }
        Ok(Channel { geom, diffusion, series })
    }

    pub fn from_scenario(scenario: &Scenario, series: SeriesConfig) -> Result<Self> {
        Channel::new(derive_geometry(scenario)?, scenario.diffusion_coeff, series)
    }

    pub fn geometry(&self) -> &FarGeometry {
        &self.geom
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn series(&self) -> SeriesConfig {
        self.series
    }

    /// Hitting probability of `far` as if the other receiver were absent.
    pub fn p1_hit(&self, far: Far, t: f64) -> f64 {
        p1_unchecked(t, self.geom.radius, self.geom.radial(far), self.diffusion)
    }

    pub fn p2_hit(&self, far: Far, t: f64) -> f64 {
        self.p2_series(far, t).value
    }

    pub fn p2_series(&self, far: Far, t: f64) -> SeriesSum {
        if t <= 0.0 || self.diffusion <= 0.0 {
            return SeriesSum { value: 0.0, terms: 0, converged: true };
        }
        let a = self.geom.radius;
        let (ri, rj) = (self.geom.radial(far), self.geom.radial(far.other()));
        let (rij, rji) = (self.geom.r_ij(far), self.geom.r_ji(far));
        let scale = 1.0 / (4.0 * self.diffusion * t).sqrt();
        let ratio = a * a / (rij * rji);
        let direct = a / ri;
        let via_other = a * a / (rj * rji);
        // Path-length increments per bounce.
        let hop_ji = rji - a;
        let hop_ij = rij - a;

        let mut sum = 0.0;
        let mut weight = 1.0;
        for n in 0..self.series.max_terms {
            let k = n as f64;
            let u = (ri - a + k * hop_ji + k * hop_ij) * scale;
            let v = (rj - a + (k + 1.0) * hop_ji + k * hop_ij) * scale;
            let term = weight * (direct * erfc(u) - via_other * erfc(v));
            sum += term;
            if term.abs() < self.series.term_floor {
                return SeriesSum { value: sum.max(0.0), terms: n + 1, converged: true };
            }
            weight *= ratio;
        }
        SeriesSum {
            value: sum.max(0.0),
            terms: self.series.max_terms,
            converged: false,
        }
    }

    /// Probability of absorption by either receiver within `t`.
    pub fn p_total(&self, t: f64) -> f64 {
        self.p2_hit(Far::First, t) + self.p2_hit(Far::Second, t)
    }

    pub fn p1_eventual(&self, far: Far) -> f64 {
        p1_eventual(self.geom.radius, self.geom.radial(far))
    }

    pub fn p2_eventual(&self, far: Far) -> f64 {
        p2_eventual(&self.geom, far).expect("validated in Channel::new")
    }

    pub fn reduction_eventual(&self, far: Far) -> f64 {
        reduction_eventual(&self.geom, far).expect("validated in Channel::new")
    }

    /// Per-slot arrival probabilities `P(n+1)Ts) − P(nTs)` for `n < slots`.
    pub fn taps(&self, far: Far, slot_duration: f64, slots: usize) -> TapVector {
        let cumulative: Vec<f64> = (0..=slots)
            .map(|n| self.p2_hit(far, n as f64 * slot_duration))
            .collect();
        TapVector {
            far,
            taps: cumulative.windows(2).map(|w| w[1] - w[0]).collect(),
            slot_duration,
        }
    }
}

/// Per-slot arrival probabilities of one receiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TapVector {
    pub far: Far,
    pub taps: Vec<f64>,
    pub slot_duration: f64,
}

impl TapVector {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Running sums; entry `n` approximates the hitting probability at
    /// `(n+1)·Ts`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.taps
            .iter()
            .scan(0.0, |acc, h| {
                *acc += h;
                Some(*acc)
            })
            .collect()
    }
}

pub fn channel_taps(scenario: &Scenario, far: Far, series: SeriesConfig) -> Result<TapVector> {
    scenario.validate()?;
    let channel = Channel::from_scenario(scenario, series)?;
    Ok(channel.taps(far, scenario.slot_duration, scenario.slots))
}

/// One receiver of radius `a` versus two receivers of radius `a/√2`
/// (equal total surface) at the same radial distance.
#[derive(Debug, Clone, Copy)]
pub struct SplitComparison {
    radius: f64,
    r1: f64,
    two: Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainPoint {
    pub t: f64,
    /// Single receiver of radius `a`.
    pub single: f64,
    /// Either of the two receivers of radius `a/√2`.
    pub split_total: f64,
    /// `split_total / single`; `None` while `single` is 0.
    pub gain: Option<f64>,
    /// `√2·erfc((r−a/√2)/√(4Dt)) / erfc((r−a)/√(4Dt))`, always `< √2`.
    pub cap: Option<f64>,
    /// Small-time bound from the erfc bracketing inequalities; only defined
    /// while `t < (r−a)²/(2D)`.
    pub small_t_bound: Option<f64>,
    pub gain_infinity: f64,
}

impl SplitComparison {
    pub fn new(
        pos1: Vec3,
        pos2: Vec3,
        radius: f64,
        diffusion: f64,
        series: SeriesConfig,
    ) -> Result<Self> {
        let small = radius * FRAC_1_SQRT_2;
        let geom = FarGeometry::from_positions(pos1, pos2, small)?;
        if (geom.r1 - geom.r2).abs() > 1e-9 * geom.r1.max(geom.r2) {
            return Err(Error::Geometry(format!(
                "gain comparison needs equal radial distances, got r1={} r2={}",
                geom.r1, geom.r2
            )));
        }
        if geom.r1 <= radius {
            return Err(Error::Geometry(format!(
                "single receiver of radius {radius} encloses the transmitter"
            )));
        }
        Ok(SplitComparison {
            radius,
            r1: geom.r1,
            two: Channel::new(geom, diffusion, series)?,
        })
    }

    pub fn split_channel(&self) -> &Channel {
        &self.two
    }

    pub fn gain_infinity(&self) -> f64 {
        let r = self.two.geometry().r12;
        2.0 * r / (SQRT_2 * r + self.radius)
    }

    pub fn at(&self, t: f64) -> GainPoint {
        let a = self.radius;
        let r = self.r1;
        let d = self.two.diffusion();
        let single = p1_unchecked(t, a, r, d);
        let split_total = self.two.p_total(t);
        let gain = (single > 0.0).then(|| split_total / single);

        let (near_single, near_split) = if t > 0.0 && d > 0.0 {
            let s = (4.0 * d * t).sqrt();
            (erfc((r - a) / s), erfc((r - a * FRAC_1_SQRT_2) / s))
        } else {
            (0.0, 0.0)
        };
        let cap = (near_single > 0.0).then(|| SQRT_2 * near_split / near_single);

        let margin = FRAC_1_SQRT_2 - SQRT_2 * d * t / ((r - a) * (r - a));
        let small_t_bound = (t > 0.0 && margin > 0.0).then(|| {
            let exponent = -((2.0 - SQRT_2) * a * r - a * a / 2.0) / (4.0 * d * t);
            (r - a) / (r - a * FRAC_1_SQRT_2) * exponent.exp() / margin
        });

        GainPoint {
            t,
            single,
            split_total,
            gain,
            cap,
            small_t_bound,
            gain_infinity: self.gain_infinity(),
        }
    }
}
