//! Physical configuration of the link. Lengths are in μm, times in s and
//! the diffusion coefficient in μm²/s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// A point transmitter at the origin, two absorbing spheres of equal radius
/// and the OOK slot parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub diffusion_coeff: f64,
    pub far_radius: f64,
    pub pos1: Vec3,
    pub pos2: Vec3,
    pub slot_duration: f64,
    pub molecules_per_bit: u64,
    /// Probability of sending a 1.
    pub bit_prior: f64,
    pub noise_mean: f64,
    pub noise_var: f64,
    /// Number of slots; also the slot index the detector looks at.
    pub slots: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            diffusion_coeff: 100.0,
            far_radius: 5.0,
            pos1: [30.0, 0.0, 0.0],
            pos2: [30.0, 15.0, 0.0],
            slot_duration: 1.0,
            molecules_per_bit: 1000,
            bit_prior: 0.5,
            noise_mean: 5.0,
            noise_var: 5.0,
            slots: 10,
        }
    }
}

impl Scenario {
    pub fn with_positions(mut self, pos1: Vec3, pos2: Vec3) -> Self {
        self.pos1 = pos1;
        self.pos2 = pos2;
        self
    }

    pub fn bit_prior_zero(&self) -> f64 {
        1.0 - self.bit_prior
    }

    /// Checks the scalar invariants. Geometry is checked separately by
    /// [`crate::geometry::derive_geometry`].
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.diffusion_coeff,
            self.far_radius,
            self.slot_duration,
            self.bit_prior,
            self.noise_mean,
            self.noise_var,
        ]
        .iter()
        .chain(self.pos1.iter())
        .chain(self.pos2.iter())
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidScenario("non-finite parameter".into()));
        }
        if self.diffusion_coeff <= 0.0 {
            return Err(Error::InvalidScenario("diffusion_coeff must be > 0".into()));
        }
        if self.far_radius <= 0.0 {
            return Err(Error::InvalidScenario("far_radius must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.bit_prior) {
            return Err(Error::InvalidScenario("bit_prior must lie in [0, 1]".into()));
        }
        if self.noise_var < 0.0 {
            return Err(Error::InvalidScenario("noise_var must be >= 0".into()));
        }
        if self.slot_duration <= 0.0 {
            return Err(Error::InvalidScenario("slot_duration must be > 0".into()));
        }
        if self.slots < 1 {
            return Err(Error::InvalidScenario("slots must be >= 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
