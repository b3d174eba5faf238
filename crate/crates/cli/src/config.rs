use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use domainwall::solver::{SolverConfig, MAX_EPS};
use domainwall::{EquilibriumSide, ModelParams};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "domainwall",
    version,
    about = "Domain-wall profiles of a two-component condensate near weak segregation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the wall at one parameter point; writes the profile and a
    /// validation report.
    Solve(SolveArgs),
    /// Integrate the reduced angular flow of the singular limit.
    Reduced(ReducedArgs),
    /// Re-validate a stored profile.
    Validate(ValidateArgs),
    /// Solve a decreasing eps ladder and fit the convergence rates.
    Sweep(SweepArgs),
    /// Print the closed-form equilibrium eigenvalues and eigendirections.
    Spectrum(SpectrumArgs),
}

/// Interaction strength, given either directly as eps or as the coupling
/// it encodes; exactly one must be present.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Strength {
    /// Segregation parameter eps = sqrt(coupling - 1), in (0, 0.5].
    #[arg(long)]
    pub eps: Option<f64>,

    /// Coupling constant (> 1); eps is derived.
    #[arg(long)]
    pub coupling: Option<f64>,
}

impl Strength {
    pub fn to_params(&self, lambda: f64) -> Result<ModelParams, CliError> {
        let params = match (self.eps, self.coupling) {
            (Some(eps), None) => ModelParams::from_eps(lambda, eps),
            (None, Some(coupling)) => ModelParams::from_coupling(lambda, coupling),
            // The clap group guarantees exactly one flag.
            _ => unreachable!("strength group admits exactly one flag"),
        }
        .map_err(|err| CliError::Usage(err.to_string()))?;
        if params.eps() > MAX_EPS {
            return Err(CliError::Usage(format!(
                "eps = {} outside the validity envelope (0, {MAX_EPS}]",
                params.eps()
            )));
        }
        Ok(params)
    }
}

/// Optional overrides of the solver defaults.
#[derive(Debug, Args)]
pub struct SolverOverrides {
    /// Domain half-length (default 24 * max(1, lambda)).
    #[arg(long)]
    pub half_length: Option<f64>,

    /// Node count, odd so x = 0 is a node (default 2401).
    #[arg(long)]
    pub nodes: Option<usize>,

    /// Newton residual sup-norm target (default 1e-10).
    #[arg(long)]
    pub tol: Option<f64>,
}

impl SolverOverrides {
    pub fn to_config(&self, lambda: f64) -> Result<SolverConfig, CliError> {
        let mut config = SolverConfig::for_lambda(lambda);
        if let Some(half_length) = self.half_length {
            if !half_length.is_finite() || half_length <= 0.0 {
                return Err(CliError::Usage(format!(
                    "--half-length must be finite and positive, got {half_length}"
                )));
            }
            config.half_length = half_length;
        }
        if let Some(n) = self.nodes {
            config.n = n;
        }
        if let Some(tol) = self.tol {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(CliError::Usage(format!(
                    "--tol must be finite and positive, got {tol}"
                )));
            }
            config.newton_tol = tol;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

impl From<Side> for EquilibriumSide {
    fn from(side: Side) -> Self {
        match side {
            Side::Left => EquilibriumSide::Left,
            Side::Right => EquilibriumSide::Right,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Mass ratio (>= 1).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    #[command(flatten)]
    pub strength: Strength,

    #[command(flatten)]
    pub solver: SolverOverrides,

    /// Profile output path (default profile.csv / profile.json).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Validation report output path (default report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Profile encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    /// Mass ratio (>= 1).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    /// Domain half-length (default 12 * max(1, lambda)).
    #[arg(long)]
    pub half_length: Option<f64>,

    /// Node count, odd (default 4801).
    #[arg(long)]
    pub nodes: Option<usize>,

    /// Output path (default reduced.csv / reduced.json).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Profile CSV to validate.
    #[arg(long)]
    pub input: PathBuf,

    /// Report output path; omitted means standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Mass ratio (>= 1).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    /// Strictly decreasing eps ladder.
    #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
    pub eps_list: Vec<f64>,

    #[command(flatten)]
    pub solver: SolverOverrides,

    /// Directory receiving study.json and the per-eps profile CSVs.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,

    /// Solver worker threads; 0 means one per processor.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Mass ratio (>= 1).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    #[command(flatten)]
    pub strength: Strength,

    /// Which rest state to linearize at.
    #[arg(long, value_enum)]
    pub side: Side,

    /// Output path; omitted means standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
