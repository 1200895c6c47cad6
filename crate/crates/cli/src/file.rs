//! Scenario files: the scenario fields at top level plus optional `sim` and
//! `sweep` blocks.

use std::path::Path;

use mcvd_core::particle::SimConfig;
use mcvd_core::scenario::Vec3;
use mcvd_core::Scenario;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub diffusion_coeff: f64,
    pub far_radius: f64,
    pub pos1: Vec3,
    pub pos2: Vec3,
    pub slot_duration: Option<f64>,
    pub molecules_per_bit: Option<u64>,
    pub bit_prior: Option<f64>,
    pub noise_mean: Option<f64>,
    pub noise_var: Option<f64>,
    pub slots: Option<usize>,
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub sweep: Sweep,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub t_grid: Option<Vec<f64>>,
    /// Degrees.
    pub phi_grid: Option<Vec<f64>>,
    pub min_phi_deg: Option<f64>,
    /// Evaluation time for angle sweeps and error maps.
    pub t: Option<f64>,
    pub n_grid: Option<Vec<u64>>,
    pub r_grid: Option<Vec<f64>>,
    pub map: Option<MapGrid>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default)]
    pub z: f64,
}

impl ScenarioFile {
    pub fn scenario(&self) -> Scenario {
        let d = Scenario::default();
        Scenario {
            diffusion_coeff: self.diffusion_coeff,
            far_radius: self.far_radius,
            pos1: self.pos1,
            pos2: self.pos2,
            slot_duration: self.slot_duration.unwrap_or(d.slot_duration),
            molecules_per_bit: self.molecules_per_bit.unwrap_or(d.molecules_per_bit),
            bit_prior: self.bit_prior.unwrap_or(d.bit_prior),
            noise_mean: self.noise_mean.unwrap_or(d.noise_mean),
            noise_var: self.noise_var.unwrap_or(d.noise_var),
            slots: self.slots.unwrap_or(d.slots),
        }
    }
}

pub struct Loaded {
    pub file: ScenarioFile,
    pub scenario: Scenario,
    /// Hex SHA-256 of the file bytes.
    pub hash: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let scenario = file.scenario();
    scenario.validate()?;
    if let Some(sim) = &file.sim {
        sim.validate()?;
    }
    let hash = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { file, scenario, hash })
}
