mod commands;
mod file;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mcvd-duo", version, about = "Diffusive molecular link with two absorbing receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario JSON file (lengths in μm, times in s).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw; overrides `sim.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct SimFlags {
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Test containment after every step instead of fusing steps far from
    /// the receivers.
    #[arg(long)]
    pub every_step: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    N,
    R,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AucMode {
    /// Numeric quadrature.
    Analytic,
    Closed,
    Mc,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lower {
    NegInf,
    Zero,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hitting probabilities over time.
    Hit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_grid: Option<String>,
    },
    /// Hitting probabilities as the second receiver moves on a circle.
    SweepAngle {
        #[command(flatten)]
        common: Common,
        /// Angles in degrees.
        #[arg(long)]
        phi_grid: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        min_phi: Option<f64>,
    },
    /// One receiver of radius a against two of radius a/√2.
    Gain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_grid: Option<String>,
    },
    /// AUC of each receiver and of joint detection.
    Auc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        sweep: SweepVar,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "all")]
        mode: AucMode,
        /// Link Monte-Carlo trials per grid point.
        #[arg(long, default_value_t = 200_000)]
        trials: usize,
        #[arg(long, value_enum, default_value = "neg-inf")]
        lower_limit: Lower,
    },
    /// Analytic results against particle and link Monte-Carlo; JSON report.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        #[arg(long, default_value_t = 1_000_000)]
        link_trials: usize,
        #[arg(long, default_value_t = 200_000)]
        auc_trials: usize,
        /// Perturbs this tap by 1e-6 before the conservation check.
        #[arg(long, hide = true)]
        corrupt_tap: Option<usize>,
    },
    /// Approximation error of FAR1 over a grid of FAR2 positions.
    ErrorMap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        #[arg(long)]
        x_grid: Option<String>,
        #[arg(long)]
        y_grid: Option<String>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const SCHEMA: u8 = 2;
    pub const GEOMETRY: u8 = 3;
    pub const VALIDATION: u8 = 4;

    pub fn schema(message: impl Into<String>) -> Self {
        CliError { code: Self::SCHEMA, message: message.into() }
    }

    pub fn geometry(message: impl Into<String>) -> Self {
        CliError { code: Self::GEOMETRY, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<mcvd_core::Error> for CliError {
    fn from(e: mcvd_core::Error) -> Self {
        use mcvd_core::Error::*;
        match e {
            Geometry(_) | ZeroRadialDistance(_) => CliError::geometry(e.to_string()),
            _ => CliError::schema(e.to_string()),
        }
    }
}

/// Worker cap from `MCVD_THREADS`.
fn threads() -> Result<Option<usize>, CliError> {
    match std::env::var("MCVD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::schema(format!("MCVD_THREADS must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = threads()?;
    match cli.command {
        Command::Hit { common, t_grid } => commands::hit(&common, t_grid.as_deref()),
        Command::SweepAngle { common, phi_grid, t, min_phi } => {
            commands::sweep_angle(&common, phi_grid.as_deref(), t, min_phi)
        }
        Command::Gain { common, t_grid } => commands::gain(&common, t_grid.as_deref()),
        Command::Auc { common, sweep, grid, mode, trials, lower_limit } => commands::auc(
            &common,
            commands::AucArgs { sweep, grid: grid.as_deref(), mode, trials, lower: lower_limit, threads },
        ),
        Command::Validate { common, sim, link_trials, auc_trials, corrupt_tap } => {
            commands::validate(&common, &sim, link_trials, auc_trials, corrupt_tap, threads)
        }
        Command::ErrorMap { common, sim, x_grid, y_grid, z, t } => commands::error_map(
            &common,
            &sim,
            commands::MapArgs { x: x_grid.as_deref(), y: y_grid.as_deref(), z, t },
            threads,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
