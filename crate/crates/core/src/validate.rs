//! Analytic-versus-oracle checks with fixed tolerances, as run by the
//! `validate` command.

use serde::Serialize;

use crate::channel::{Channel, SeriesConfig, TapVector};
use crate::detection::{auc_closed_form, auc_empirical, auc_numeric};
use crate::error::Result;
use crate::geometry::{derive_geometry, validity_report, Diagnostic, Far};
use crate::link::{
    class_moments, hypothesis_stats, joint_stats, simulate_joint_link, simulate_link_on,
    HypothesisStats, Receiver,
};
use crate::particle::{empirical_hitting, simulate_on, SimConfig};
use crate::scenario::{norm, Scenario};

/// |analytic − particle oracle| for hitting probabilities.
pub const HIT_PROBABILITY_ABS: f64 = 0.01;
/// |p2 − p1| for receivers far enough apart to be decoupled.
pub const DECOUPLING_ABS: f64 = 0.005;
/// Agreement between the three AUC routes.
pub const AUC_ABS: f64 = 0.01;
/// Monte-Carlo moments must match within this many standard errors.
pub const STANDARD_ERRORS: f64 = 3.0;
/// Partial sums of taps against the hitting probability.
pub const TAP_CONSERVATION_ABS: f64 = 1e-12;
/// Eventual-reduction identity.
pub const REDUCTION_IDENTITY_ABS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Observed deviation (or standard-error multiple for moment checks).
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            tolerance,
            passed: observed <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub checks: Vec<Check>,
    /// Measured like checks but not gating: the joint statistics add the
    /// receivers' moments as if independent, which close receivers violate.
    pub observations: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub sim: SimConfig,
    pub t_grid: Vec<f64>,
    pub link_trials: usize,
    pub auc_trials: usize,
    pub seed: u64,
    pub series: SeriesConfig,
    pub threads: Option<usize>,
    /// Adds this amount to the tap at the given index before the
    /// conservation check (fault injection).
    pub corrupt_tap: Option<(usize, f64)>,
}

impl ValidateOptions {
    pub fn new(sim: SimConfig) -> Self {
        ValidateOptions {
            t_grid: vec![sim.t_max / 4.0, sim.t_max / 2.0, 3.0 * sim.t_max / 4.0, sim.t_max],
            sim,
            link_trials: 1_000_000,
            auc_trials: 200_000,
            seed: sim.seed,
            series: SeriesConfig::default(),
            threads: None,
            corrupt_tap: None,
        }
    }
}

/// Partial sums of `taps` against the hitting probability at slot edges.
pub fn check_tap_conservation(channel: &Channel, taps: &TapVector) -> Check {
    let worst = taps
        .partial_sums()
        .iter()
        .enumerate()
        .map(|(n, s)| (s - channel.p2_hit(taps.far, (n + 1) as f64 * taps.slot_duration)).abs())
        .fold(0.0, f64::max);
    Check::new(
        format!("tap conservation {}", taps.far),
        worst,
        TAP_CONSERVATION_ABS,
    )
}

fn hit_checks(
    label: &str,
    scenario: &Scenario,
    channel: &Channel,
    opts: &ValidateOptions,
    single: bool,
) -> Result<Vec<Check>> {
    let grid: Vec<f64> = opts.t_grid.iter().copied().filter(|&t| t > 0.0 && t <= opts.sim.t_max).collect();
    let records = simulate_on(scenario, &opts.sim, opts.threads)?;
    let curves = empirical_hitting(&records, &grid);
    let fars: &[Far] = if single { &[Far::First] } else { &Far::BOTH };
    let mut out = Vec::new();
    for &far in fars {
        for (i, &t) in grid.iter().enumerate() {
            let analytic = if single { channel.p1_hit(far, t) } else { channel.p2_hit(far, t) };
            out.push(Check::new(
                format!("{label} {far} t={t}"),
                (analytic - curves.curve(far)[i]).abs(),
                HIT_PROBABILITY_ABS,
            ));
        }
    }
    Ok(out)
}

fn moment_checks(
    stats: &HypothesisStats,
    scenario: &Scenario,
    taps: &TapVector,
    opts: &ValidateOptions,
) -> Result<Vec<Check>> {
    let samples = simulate_link_on(taps, scenario, stats.slot, opts.link_trials, opts.seed, opts.threads)?;
    let mut out = Vec::new();
    for (bit, mu, var) in [(0u8, stats.mu0, stats.var0), (1, stats.mu1, stats.var1)] {
        let Some(m) = class_moments(&samples, bit) else { continue };
        let z_mean = if m.se_mean > 0.0 { (m.mean - mu).abs() / m.se_mean } else { (m.mean - mu).abs() };
        let z_var = if m.se_var > 0.0 { (m.var - var).abs() / m.se_var } else { (m.var - var).abs() };
        out.push(Check::new(format!("link mean {} b={bit} (in SE)", taps.far), z_mean, STANDARD_ERRORS));
        out.push(Check::new(format!("link variance {} b={bit} (in SE)", taps.far), z_var, STANDARD_ERRORS));
    }
    Ok(out)
}

/// Runs every check for `scenario`.
pub fn run_validation(scenario: &Scenario, opts: &ValidateOptions) -> Result<ValidationReport> {
    scenario.validate()?;
    let geom = derive_geometry(scenario)?;
    let diagnostics = validity_report(&geom);
    let channel = Channel::new(geom, scenario.diffusion_coeff, opts.series)?;
    let mut checks = hit_checks("hitting probability", scenario, &channel, opts, false)?;

    // Second receiver pushed 10⁶·a away, opposite the first.
    let a = scenario.far_radius;
    let r1 = norm(&scenario.pos1);
    let far_pos = scenario.pos1.map(|c| -c / r1 * 1e6 * a);
    let lone = Scenario { pos2: far_pos, ..scenario.clone() };
    let lone_channel = Channel::from_scenario(&lone, opts.series)?;
    checks.extend(hit_checks("single receiver", &lone, &lone_channel, opts, true)?);
    checks.push(Check::new(
        "decoupling |p2 - p1| FAR1",
        (lone_channel.p2_hit(Far::First, opts.sim.t_max) - lone_channel.p1_hit(Far::First, opts.sim.t_max)).abs(),
        DECOUPLING_ABS,
    ));

    let mut taps = Vec::new();
    for far in Far::BOTH {
        let mut t = channel.taps(far, scenario.slot_duration, scenario.slots);
        if let Some((idx, delta)) = opts.corrupt_tap {
            if let Some(h) = t.taps.get_mut(idx) {
                *h += delta;
            }
        }
        checks.push(check_tap_conservation(&channel, &t));
        checks.push(Check::new(
            format!("eventual reduction identity {far}"),
            (channel.reduction_eventual(far) - (channel.p1_eventual(far) - channel.p2_eventual(far))).abs(),
            REDUCTION_IDENTITY_ABS,
        ));
        taps.push(t);
    }

    let slot = scenario.slots;
    let s1 = hypothesis_stats(&taps[0], scenario, slot)?;
    let s2 = hypothesis_stats(&taps[1], scenario, slot)?;
    let sj = joint_stats(&s1, &s2)?;
    checks.extend(moment_checks(&s1, scenario, &taps[0], opts)?);
    checks.extend(moment_checks(&s2, scenario, &taps[1], opts)?);

    let mut observations = Vec::new();
    let joint = simulate_joint_link(&taps[0], &taps[1], scenario, slot, opts.auc_trials, opts.seed ^ 0xA5A5, opts.threads)?;
    for (rx, stats) in [(Receiver::Single(Far::First), s1), (Receiver::Single(Far::Second), s2), (Receiver::Joint, sj)] {
        if stats.ensure_nondegenerate().is_err() {
            continue;
        }
        let label = match rx {
            Receiver::Single(f) => f.to_string(),
            Receiver::Joint => "joint".into(),
        };
        let numeric = auc_numeric(&stats)?;
        let closed = auc_closed_form(&stats)?;
        checks.push(Check::new(format!("AUC closed vs numeric {label}"), (closed - numeric).abs(), AUC_ABS));
        let samples: Vec<_> = joint.iter().map(|s| s.receiver(rx)).collect();
        if let Ok(emp) = auc_empirical(&samples) {
            let target = if rx == Receiver::Joint { &mut observations } else { &mut checks };
            target.push(Check::new(format!("AUC numeric vs Monte-Carlo {label}"), (numeric - emp).abs(), AUC_ABS));
        }
    }

    Ok(ValidationReport { diagnostics, checks, observations })
}
