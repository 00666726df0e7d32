//! Run configuration: CLI flags, validation, and the JSON round trip.

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Evolve,
    Density,
    Trajectory,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    Free,
    Rotation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Simulate a particle on the unit sphere prepared in a coherent state.
///
/// The default parameters reproduce the standard beating configuration:
/// position on the equator at azimuth zero, angular momentum with l3 = j and
/// |l| = sqrt(j(j+1)) for j = 11.
#[derive(Parser, Debug)]
#[command(name = "rotor", version, about)]
pub struct Cli {
    /// What to compute.
    #[arg(long, value_enum)]
    pub mode: Mode,

    /// Shorthand for the standard family: sets l3 = j and |l| = sqrt(j(j+1)).
    #[arg(long)]
    pub j: Option<u32>,

    /// Polar angle of the initial position (radians).
    #[arg(long, default_value_t = FRAC_PI_2)]
    pub theta_bar: f64,

    /// Azimuth of the initial position (radians).
    #[arg(long, default_value_t = 0.0)]
    pub phi_bar: f64,

    /// Third component of the classical angular momentum (sets the tilt
    /// angle alpha = arccos(l3/|l|)).
    #[arg(long)]
    pub l3: Option<f64>,

    /// Norm of the classical angular momentum.
    #[arg(long)]
    pub l_norm: Option<f64>,

    /// Evolution generator.
    #[arg(long, value_enum, default_value_t = HamiltonianKind::Free)]
    pub hamiltonian: HamiltonianKind,

    /// Rotation frequency about e3 (used with --hamiltonian rotation).
    #[arg(long, default_value_t = 1.0)]
    pub omega3: f64,

    /// Start time.
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,

    /// End time.
    #[arg(long, default_value_t = 8.0 * PI)]
    pub t1: f64,

    /// Number of time samples in [t0, t1].
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,

    /// Density grid as THETAxPHI, e.g. 128x256.
    #[arg(long, default_value = "128x256")]
    pub grid: String,

    /// Truncation level: 'auto' or an explicit shell count.
    #[arg(long, default_value = "auto")]
    pub jmax: String,

    /// Output path; defaults to rotor_<mode>.<format>.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Primary output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Worker threads (output bytes do not depend on this).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

/// Fully resolved run description; this is what the JSON sidecar records and
/// what can be re-ingested to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub theta_bar: f64,
    pub phi_bar: f64,
    pub l3: f64,
    pub l_norm: f64,
    pub hamiltonian: HamiltonianKind,
    pub omega3: f64,
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    pub grid: [usize; 2],
    /// `None` selects the truncation automatically.
    pub j_max: Option<u32>,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub threads: usize,
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, ConfigError> {
        let (l3, l_norm) = match (cli.j, cli.l3, cli.l_norm) {
            (Some(j), None, None) => {
                let l3 = j as f64;
                (l3, (l3 * (l3 + 1.0)).sqrt())
            }
            (Some(_), _, _) => {
                return Err(ConfigError::Usage(
                    "--j is a shorthand and cannot be combined with --l3/--l-norm".into(),
                ));
            }
            (None, l3, l_norm) => {
                let l3 = l3.unwrap_or(11.0);
                let l_norm = l_norm.unwrap_or_else(|| (l3.abs() * (l3.abs() + 1.0)).sqrt());
                (l3, l_norm)
            }
        };

        let grid = parse_grid(&cli.grid)?;
        let j_max = match cli.jmax.as_str() {
            "auto" => None,
            s => Some(s.parse::<u32>().map_err(|_| {
                ConfigError::Usage(format!("--jmax expects 'auto' or an integer, got '{s}'"))
            })?),
        };
        let out = cli.out.clone().unwrap_or_else(|| {
            let ext = match (cli.mode, cli.format) {
                (Mode::Verify, _) => "json",
                (_, OutputFormat::Csv) => "csv",
                (_, OutputFormat::Json) => "json",
            };
            let mode = match cli.mode {
                Mode::Evolve => "evolve",
                Mode::Density => "density",
                Mode::Trajectory => "trajectory",
                Mode::Verify => "verify",
            };
            PathBuf::from(format!("rotor_{mode}.{ext}"))
        });

        let cfg = Self {
            mode: cli.mode,
            theta_bar: cli.theta_bar,
            phi_bar: cli.phi_bar,
            l3,
            l_norm,
            hamiltonian: cli.hamiltonian,
            omega3: cli.omega3,
            t0: cli.t0,
            t1: cli.t1,
            samples: cli.samples,
            grid,
            j_max,
            out,
            format: cli.format,
            threads: cli.threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.t1 <= self.t0 || self.t1.is_nan() || self.t0.is_nan() {
            return Err(ConfigError::Usage(format!(
                "t1 must exceed t0 (got t0 = {}, t1 = {})",
                self.t0, self.t1
            )));
        }
        if self.samples < 2 {
            return Err(ConfigError::Usage("samples must be at least 2".into()));
        }
        if self.grid[0] < 16 || self.grid[1] < 16 {
            return Err(ConfigError::Usage(format!(
                "grid dimensions must be at least 16 (got {}x{})",
                self.grid[0], self.grid[1]
            )));
        }
        if self.grid[1] % 2 != 0 {
            return Err(ConfigError::Usage("the phi grid dimension must be even".into()));
        }
        if self.l_norm < self.l3.abs() {
            return Err(ConfigError::Usage(format!(
                "l_norm must be at least |l3| (got l3 = {}, l_norm = {})",
                self.l3, self.l_norm
            )));
        }
        if self.threads == 0 {
            return Err(ConfigError::Usage("threads must be positive".into()));
        }
        Ok(())
    }

    /// Tilt angle between l and the meridian, from the standard relation.
    pub fn alpha(&self) -> f64 {
        if self.l_norm == 0.0 { 0.0 } else { (self.l3 / self.l_norm).acos() }
    }

    /// Sample times, inclusive of both endpoints.
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        let dt = (self.t1 - self.t0) / (n as f64 - 1.0);
        (0..n).map(|k| self.t0 + k as f64 * dt).collect()
    }
}

fn parse_grid(s: &str) -> Result<[usize; 2], ConfigError> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(ConfigError::Usage(format!("--grid expects THETAxPHI, got '{s}'")));
    }
    let a = parts[0]
        .parse::<usize>()
        .map_err(|_| ConfigError::Usage(format!("bad grid dimension '{}'", parts[0])))?;
    let b = parts[1]
        .parse::<usize>()
        .map_err(|_| ConfigError::Usage(format!("bad grid dimension '{}'", parts[1])))?;
    Ok([a, b])
}
