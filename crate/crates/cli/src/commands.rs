use mcvd_core::channel::SplitComparison;
use mcvd_core::detection::{auc_closed_form_with, auc_empirical, auc_numeric_with, LowerLimit};
use mcvd_core::geometry::{validity_report, Far, FarGeometry, Severity};
use mcvd_core::link::{hypothesis_stats, joint_stats, simulate_joint_link, Receiver};
use mcvd_core::particle::{error_map as run_error_map, CellStatus, SimConfig, Stepping};
use mcvd_core::scenario::Vec3;
use mcvd_core::validate::{run_validation, ValidateOptions};
use mcvd_core::{Channel, Scenario, SeriesConfig};
use serde::Serialize;

use crate::file::{load, Loaded};
use crate::grid::parse_grid;
use crate::output::{emit, num, opt, render_csv, Provenance, Table};
use crate::{AucMode, CliError, Common, Lower, SimFlags, SweepVar};

const SKIPPED: &str = "skipped";
const DEFAULT_MIN_PHI_DEG: f64 = 20.0;

/// Grid from the flag if given, else from the file.
fn grid(flag: Option<&str>, from_file: Option<&Vec<f64>>, what: &str) -> Result<Vec<f64>, CliError> {
    let g = match (flag, from_file) {
        (Some(s), _) => parse_grid(s)?,
        (None, Some(v)) => v.clone(),
        (None, None) => return Err(CliError::schema(format!("no {what} given"))),
    };
    if g.is_empty() {
        return Err(CliError::schema(format!("{what} is empty")));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(CliError::schema(format!("{what} has non-finite values")));
    }
    Ok(g)
}

fn seed(common: &Common, loaded: &Loaded) -> u64 {
    common.seed.or(loaded.file.sim.map(|s| s.seed)).unwrap_or(0)
}

fn warn_validity(geom: &FarGeometry) {
    for d in validity_report(geom) {
        if d.severity == Severity::Warning {
            eprintln!("warning: {}", d.message);
        }
    }
}

fn write_table(common: &Common, loaded: &Loaded, table: &Table) -> Result<(), CliError> {
    let prov = Provenance { seed: seed(common, loaded), scenario_hash: &loaded.hash };
    emit(&render_csv(table, &prov)?, common.out.as_deref())
}

fn channel(scenario: &Scenario) -> Result<Channel, CliError> {
    let ch = Channel::from_scenario(scenario, SeriesConfig::default())?;
    warn_validity(ch.geometry());
    Ok(ch)
}

pub fn hit(common: &Common, t_grid: Option<&str>) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let ts = grid(t_grid, loaded.file.sweep.t_grid.as_ref(), "t grid")?;
    if ts.iter().any(|&t| t < 0.0) {
        return Err(CliError::schema("times must be >= 0"));
    }
    let ch = channel(&loaded.scenario)?;
    let mut table = Table::new(["t", "p1_far1", "p1_far2", "p2_far1", "p2_far2", "p_total"]);
    for t in ts {
        table.push(vec![
            num(t),
            num(ch.p1_hit(Far::First, t)),
            num(ch.p1_hit(Far::Second, t)),
            num(ch.p2_hit(Far::First, t)),
            num(ch.p2_hit(Far::Second, t)),
            num(ch.p_total(t)),
        ]);
    }
    write_table(common, &loaded, &table)
}

fn norm(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scale(v: &Vec3, s: f64) -> Vec3 {
    v.map(|x| x * s)
}

pub fn sweep_angle(
    common: &Common,
    phi_grid: Option<&str>,
    t: Option<f64>,
    min_phi: Option<f64>,
) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let sweep = &loaded.file.sweep;
    let phis = grid(phi_grid, sweep.phi_grid.as_ref(), "phi grid")?;
    let t = t.or(sweep.t).ok_or_else(|| CliError::schema("no evaluation time t given"))?;
    let min_phi = min_phi.or(sweep.min_phi_deg).unwrap_or(DEFAULT_MIN_PHI_DEG);
    if let Some(&bad) = phis.iter().find(|&&p| p < min_phi || p > 180.0) {
        return Err(CliError::geometry(format!(
            "phi={bad} deg outside [{min_phi}, 180]; smaller angles make the receivers overlap"
        )));
    }
    let s = &loaded.scenario;
    let (r1, r2) = (norm(&s.pos1), norm(&s.pos2));
    if r1 == 0.0 || r2 == 0.0 {
        return Err(CliError::geometry("a receiver is centered on the transmitter"));
    }
    // Only r1, r2 and phi matter, so the receivers are placed as mirror
    // images about the x axis; equal radii then give identical values.
    let mut table = Table::new(["phi_deg", "R", "p2_far1", "p2_far2", "p_total"]);
    for phi in phis {
        let half = (phi / 2.0).to_radians();
        let (c, sn) = (half.cos(), half.sin());
        let geom = FarGeometry::from_positions([r1 * c, r1 * sn, 0.0], [r2 * c, -r2 * sn, 0.0], s.far_radius)?;
        let mut row = vec![num(phi), num(geom.distance)];
        match Channel::new(geom, s.diffusion_coeff, SeriesConfig::default()) {
            Ok(ch) => row.extend([
                num(ch.p2_hit(Far::First, t)),
                num(ch.p2_hit(Far::Second, t)),
                num(ch.p_total(t)),
            ]),
            Err(mcvd_core::Error::Geometry(_)) => row.extend([SKIPPED; 3].map(String::from)),
            Err(e) => return Err(e.into()),
        }
        table.push(row);
    }
    write_table(common, &loaded, &table)
}

pub fn gain(common: &Common, t_grid: Option<&str>) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let ts = grid(t_grid, loaded.file.sweep.t_grid.as_ref(), "t grid")?;
    let s = &loaded.scenario;
    let cmp = SplitComparison::new(s.pos1, s.pos2, s.far_radius, s.diffusion_coeff, SeriesConfig::default())?;
    let mut table = Table::new(["t", "p1_single", "p_total_two", "gain", "bound_small_t", "gain_infinity"]);
    for t in ts {
        let p = cmp.at(t);
        table.push(vec![
            num(t),
            num(p.single),
            num(p.split_total),
            opt(p.gain),
            opt(p.small_t_bound),
            num(p.gain_infinity),
        ]);
    }
    write_table(common, &loaded, &table)
}

pub struct AucArgs<'a> {
    pub sweep: SweepVar,
    pub grid: Option<&'a str>,
    pub mode: AucMode,
    pub trials: usize,
    pub lower: Lower,
    pub threads: Option<usize>,
}

const RECEIVERS: [(&str, Receiver); 3] = [
    ("auc1", Receiver::Single(Far::First)),
    ("auc2", Receiver::Single(Far::Second)),
    ("auc_joint", Receiver::Joint),
];

pub fn auc(common: &Common, args: AucArgs) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let sweep = &loaded.file.sweep;
    let values = match args.sweep {
        SweepVar::N => {
            let from_file = sweep.n_grid.as_ref().map(|v| v.iter().map(|&n| n as f64).collect());
            let g = grid(args.grid, from_file.as_ref(), "N grid")?;
            if g.iter().any(|&n| n < 0.0 || n.fract() != 0.0) {
                return Err(CliError::schema("N grid values must be nonnegative integers"));
            }
            g
        }
        SweepVar::R => grid(args.grid, sweep.r_grid.as_ref(), "R grid")?,
    };
    let lower = match args.lower {
        Lower::NegInf => LowerLimit::NegInfinity,
        Lower::Zero => LowerLimit::Zero,
    };
    let kinds: &[&str] = match args.mode {
        AucMode::Analytic => &["numeric"],
        AucMode::Closed => &["closed"],
        AucMode::Mc => &["mc"],
        AucMode::All => &["closed", "numeric", "mc"],
    };
    let mut header = vec!["sweep_value".to_string()];
    for kind in kinds {
        header.extend(RECEIVERS.iter().map(|(name, _)| format!("{name}_{kind}")));
    }
    let mut table = Table::new(header);
    let base = &loaded.scenario;
    let seed = seed(common, &loaded);
    let dir = {
        let d = [0, 1, 2].map(|k| base.pos2[k] - base.pos1[k]);
        scale(&d, 1.0 / norm(&d))
    };

    for (k, &value) in values.iter().enumerate() {
        let mut s = base.clone();
        match args.sweep {
            SweepVar::N => s.molecules_per_bit = value as u64,
            SweepVar::R => s.pos2 = [0, 1, 2].map(|i| base.pos1[i] + value * dir[i]),
        }
        let mut row = vec![num(value)];
        let ch = match Channel::from_scenario(&s, SeriesConfig::default()) {
            Ok(ch) => ch,
            Err(mcvd_core::Error::Geometry(_)) if args.sweep == SweepVar::R => {
                row.extend(std::iter::repeat_n(SKIPPED.to_string(), kinds.len() * RECEIVERS.len()));
                table.push(row);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let t1 = ch.taps(Far::First, s.slot_duration, s.slots);
        let t2 = ch.taps(Far::Second, s.slot_duration, s.slots);
        let s1 = hypothesis_stats(&t1, &s, s.slots)?;
        let s2 = hypothesis_stats(&t2, &s, s.slots)?;
        let stats = [s1, s2, joint_stats(&s1, &s2)?];
        for kind in kinds {
            match *kind {
                "closed" => {
                    for st in &stats {
                        row.push(num(auc_closed_form_with(st, lower)?));
                    }
                }
                "numeric" => {
                    for st in &stats {
                        row.push(num(auc_numeric_with(st, lower)?));
                    }
                }
                _ => {
                    let point_seed = seed.wrapping_add(k as u64);
                    let samples = simulate_joint_link(&t1, &t2, &s, s.slots, args.trials, point_seed, args.threads)?;
                    for (_, rx) in RECEIVERS {
                        let ys: Vec<_> = samples.iter().map(|x| x.receiver(rx)).collect();
                        row.push(num(auc_empirical(&ys)?));
                    }
                }
            }
        }
        table.push(row);
    }
    write_table(common, &loaded, &table)
}

fn sim_config(loaded: &Loaded, flags: &SimFlags, common: &Common, default_particles: usize) -> Result<SimConfig, CliError> {
    let mut cfg = loaded.file.sim.unwrap_or(SimConfig::new(default_particles, 20.0, 0));
    if let Some(n) = flags.particles {
        cfg.n_particles = n;
    }
    if let Some(dt) = flags.dt {
        cfg.dt = dt;
    }
    if let Some(t) = flags.t_max {
        cfg.t_max = t;
    }
    if flags.every_step {
        cfg.stepping = Stepping::Every;
    }
    cfg.seed = seed(common, loaded);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    scenario_sha256: &'a str,
    passed: bool,
    #[serde(flatten)]
    report: mcvd_core::validate::ValidationReport,
}

pub fn validate(
    common: &Common,
    flags: &SimFlags,
    link_trials: usize,
    auc_trials: usize,
    corrupt_tap: Option<usize>,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let sim = sim_config(&loaded, flags, common, 100_000)?;
    let mut opts = ValidateOptions::new(sim);
    opts.link_trials = link_trials;
    opts.auc_trials = auc_trials;
    opts.threads = threads;
    opts.corrupt_tap = corrupt_tap.map(|i| (i, 1e-6));
    if let Some(ts) = &loaded.file.sweep.t_grid {
        opts.t_grid = ts.clone();
    }
    let report = run_validation(&loaded.scenario, &opts)?;
    let passed = report.passed();
    let out = ValidateOutput {
        tool: "mcvd-duo",
        version: env!("CARGO_PKG_VERSION"),
        seed: sim.seed,
        scenario_sha256: &loaded.hash,
        passed,
        report,
    };
    let mut bytes = serde_json::to_vec_pretty(&out).map_err(|e| CliError::io(e.to_string()))?;
    bytes.push(b'\n');
    emit(&bytes, common.out.as_deref())?;
    if !passed {
        let failed: Vec<_> = out.report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError { code: CliError::VALIDATION, message: format!("failed checks: {}", failed.join(", ")) });
    }
    Ok(())
}

pub struct MapArgs<'a> {
    pub x: Option<&'a str>,
    pub y: Option<&'a str>,
    pub z: Option<f64>,
    pub t: Option<f64>,
}

pub fn error_map(common: &Common, flags: &SimFlags, args: MapArgs, threads: Option<usize>) -> Result<(), CliError> {
    let loaded = load(&common.scenario)?;
    let sweep = &loaded.file.sweep;
    let map = sweep.map.as_ref();
    let xs = grid(args.x, map.map(|m| &m.x), "x grid")?;
    let ys = grid(args.y, map.map(|m| &m.y), "y grid")?;
    let z = args.z.or(map.map(|m| m.z)).unwrap_or(0.0);
    let t = args.t.or(sweep.t).ok_or_else(|| CliError::schema("no evaluation time t given"))?;
    let sim = sim_config(&loaded, flags, common, 10_000)?;
    let positions: Vec<Vec3> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y, z])).collect();
    let cells = run_error_map(&loaded.scenario, &positions, t, &sim, SeriesConfig::default(), threads)?;

    let mut table = Table::new(["x", "y", "z", "status", "analytic", "empirical", "abs_error", "approx_valid"]);
    for cell in cells {
        let [x, y, z] = cell.pos2.map(num);
        let mut row = vec![x, y, z];
        match cell.status {
            CellStatus::Skipped => row.extend([SKIPPED, "", "", "", ""].map(String::from)),
            CellStatus::Computed { analytic, empirical, abs_error, approx_valid } => row.extend([
                "computed".to_string(),
                num(analytic),
                num(empirical),
                num(abs_error),
                approx_valid.to_string(),
            ]),
        }
        table.push(row);
    }
    write_table(common, &loaded, &table)
}
