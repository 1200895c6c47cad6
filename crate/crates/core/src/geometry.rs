//! Distances and angles derived from the transmitter and receiver positions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{cross, dot, norm, sub, Scenario, Vec3};

/// One of the two absorbing receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Far {
    First,
    Second,
}

impl Far {
    pub const BOTH: [Far; 2] = [Far::First, Far::Second];

    pub fn other(self) -> Far {
        match self {
            Far::First => Far::Second,
            Far::Second => Far::First,
        }
    }

    /// 1-based label used in reports and CSV columns.
    pub fn number(self) -> u8 {
        match self {
            Far::First => 1,
            Far::Second => 2,
        }
    }
}

impl fmt::Display for Far {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FAR{}", self.number())
    }
}

/// Derived geometry of a two-receiver configuration.
///
/// `r12` is the distance from the center of the second receiver to the point
/// of the first receiver nearest the transmitter; `r21` the converse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarGeometry {
    pub radius: f64,
    pub r1: f64,
    pub r2: f64,
    /// Angle between the two receiver position vectors, in `[0, π]`.
    pub phi: f64,
    /// Center-to-center distance.
    pub distance: f64,
    pub r12: f64,
    pub r21: f64,
    pub overlap_free: bool,
    pub approx_valid: bool,
}

/// Distance from the center of receiver `i` (radial distance `r_i`) to the
/// nearest point of receiver `j` (radial distance `r_j`).
fn anchor_distance(r_j: f64, r_i: f64, radius: f64, cos_phi: f64) -> f64 {
    let near = r_j - radius;
    (near * near + r_i * r_i - 2.0 * near * r_i * cos_phi)
        .max(0.0)
        .sqrt()
}

impl FarGeometry {
    pub fn from_positions(pos1: Vec3, pos2: Vec3, radius: f64) -> Result<Self> {
        let r1 = norm(&pos1);
        let r2 = norm(&pos2);
        if r1 == 0.0 {
            return Err(Error::ZeroRadialDistance(Far::First));
        }
        if r2 == 0.0 {
            return Err(Error::ZeroRadialDistance(Far::Second));
        }
        let phi = norm(&cross(&pos1, &pos2)).atan2(dot(&pos1, &pos2));
        let cos_phi = phi.cos();
        let distance = norm(&sub(&pos1, &pos2));
        let r21 = anchor_distance(r2, r1, radius, cos_phi);
        let r12 = anchor_distance(r1, r2, radius, cos_phi);
        let overlap_free = r1 > radius && r2 > radius && distance > 2.0 * radius;
        let limit = validity_limit(radius);
        let approx_valid = r1 >= limit && r2 >= limit && distance >= limit;
        Ok(FarGeometry {
            radius,
            r1,
            r2,
            phi,
            distance,
            r12,
            r21,
            overlap_free,
            approx_valid,
        })
    }

    pub fn radial(&self, far: Far) -> f64 {
        match far {
            Far::First => self.r1,
            Far::Second => self.r2,
        }
    }

    /// `R_ij` with `i = far`.
    pub fn r_ij(&self, far: Far) -> f64 {
        match far {
            Far::First => self.r12,
            Far::Second => self.r21,
        }
    }

    /// `R_ji` with `i = far`.
    pub fn r_ji(&self, far: Far) -> f64 {
        self.r_ij(far.other())
    }

    /// Same configuration with the receivers relabeled.
    pub fn swapped(&self) -> Self {
        FarGeometry {
            r1: self.r2,
            r2: self.r1,
            r12: self.r21,
            r21: self.r12,
            ..*self
        }
    }

    pub fn ensure_overlap_free(&self) -> Result<()> {
        if self.overlap_free {
            Ok(())
        } else {
            Err(Error::Geometry(format!(
                "receivers overlap each other or the transmitter (r1={:.4}, r2={:.4}, R={:.4}, a={})",
                self.r1, self.r2, self.distance, self.radius
            )))
        }
    }
}

/// Radial and mutual distance at or above which the two-receiver
/// approximation is considered accurate. The boundary itself counts as valid
/// (with a relative slack of 1e-9 for positions built from trigonometry).
pub fn validity_limit(radius: f64) -> f64 {
    3.0 * radius * (1.0 - 1e-9)
}

pub fn derive_geometry(scenario: &Scenario) -> Result<FarGeometry> {
    FarGeometry::from_positions(scenario.pos1, scenario.pos2, scenario.far_radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

/// Lists overlap violations as errors and departures from the region where
/// the two-receiver approximation is accurate as warnings.
pub fn validity_report(geom: &FarGeometry) -> Vec<Diagnostic> {
    let a = geom.radius;
    let mut out = Vec::new();
    let mut push = |severity, message: String| out.push(Diagnostic { severity, message });
    for far in Far::BOTH {
        let r = geom.radial(far);
        if r <= a {
            push(
                Severity::Error,
                format!("{far} encloses the transmitter (r{}={r:.4} <= a={a})", far.number()),
            );
        }
    }
    if geom.distance <= 2.0 * a {
        push(
            Severity::Error,
            format!("receivers overlap (R={:.4} <= 2a={})", geom.distance, 2.0 * a),
        );
    }
    for far in Far::BOTH {
        let r = geom.radial(far);
        if r > a && r < validity_limit(a) {
            push(
                Severity::Warning,
                format!(
                    "r{}={r:.4} < 3a={}: two-receiver approximation degraded",
                    far.number(),
                    3.0 * a
                ),
            );
        }
    }
    if geom.distance > 2.0 * a && geom.distance < validity_limit(a) {
        push(
            Severity::Warning,
            format!(
                "R={:.4} < 3a={}: two-receiver approximation degraded",
                geom.distance,
                3.0 * a
            ),
        );
    }
    out
}
