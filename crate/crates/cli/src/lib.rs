//! Command-line front end: table analysis, Δ sweeps, constraint-curve
//! geometry and coverage experiments.
//!
//! Every command is a pure function of its input bytes and flags. Worker
//! count (`ASYMM_THREADS`) only changes how fast coverage replicates run.

pub mod analyze;
pub mod error;
pub mod format;
pub mod geometry;
pub mod simulation;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};

/// Version tag carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "asymm",
    version,
    about = "Measure departure from symmetry in square contingency tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate Φ and Φ^(λ) with intervals and Bowker's test for a count table.
    Analyze(AnalyzeArgs),
    /// Tabulate Φ and Φ^(λ) over conditional-symmetry models.
    Sweep(SweepArgs),
    /// Distances from points on the binary simplex to (1/2, 1/2).
    Geometry(GeometryArgs),
    /// Monte Carlo coverage of the delta-method interval.
    Coverage(CoverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightChoice {
    Uniform,
    Pair,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SingleWeight {
    Uniform,
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Offdiag,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Error,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Count table in CSV form.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub weight: WeightChoice,
    /// Comma-separated λ values for Φ^(λ); each must exceed −1.
    #[arg(long, default_value = "-0.5,0,1", allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "offdiag")]
    pub normalization: NormalizationArg,
    #[arg(long = "zero-pair-policy", value_enum, default_value = "error")]
    pub zero_pair_policy: PolicyArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "delta-min", default_value_t = 0.0)]
    pub delta_min: f64,
    #[arg(long = "delta-max", default_value_t = 1.0)]
    pub delta_max: f64,
    #[arg(long = "delta-step", default_value_t = 0.01)]
    pub delta_step: f64,
    #[arg(long, default_value = "-0.5,0,1", allow_hyphen_values = true)]
    pub lambda: String,
    /// Also write an SVG chart of every measure against Δ.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long = "grid-step", default_value_t = 0.001)]
    pub grid_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Odds Δ of the conditional-symmetry model.
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 5000)]
    pub n: u64,
    #[arg(long, default_value_t = 2000)]
    pub reps: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub weight: SingleWeight,
}

/// Parses a comma-separated λ list.
pub fn parse_lambdas(text: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v: f64 = part
            .parse()
            .map_err(|_| CliError::Input(format!("invalid lambda {part:?}")))?;
        if !(v > -1.0 && v.is_finite()) {
            return Err(CliError::Input(format!(
                "lambda must be finite and greater than -1, got {part}"
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Worker count from `ASYMM_THREADS`; unset or empty means the default pool.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var("ASYMM_THREADS") {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Input(format!(
                "ASYMM_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

pub(crate) fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Input(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(text: &str, path: Option<&PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Analyze(args) => analyze::run(args, stdout),
        Command::Sweep(args) => simulation::run_sweep(args, stdout),
        Command::Geometry(args) => geometry::run(args, stdout),
        Command::Coverage(args) => simulation::run_coverage(args, threads_from_env()?, stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "asymm: {e}");
            e.exit_code()
        }
    }
}
