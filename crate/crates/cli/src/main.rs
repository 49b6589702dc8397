//! `polymin` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other runtime failure, 2 usage error,
//! 3 degenerate or unreadable input, 4 certification failure.

mod builtin;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "polymin", version, about = "Polyhedra with n vertices of minimal A^3/V^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Randomized search for a minimal n-vertex polyhedron.
    Search(SearchArgs),
    /// Volume, area, quality and valency of a shape.
    Eval(EvalArgs),
    /// Evaluate or optimize a parametric shape family.
    Family(FamilyArgs),
    /// Certify the n = 8, 9, 10 optima against their minimal polynomials.
    Verify(VerifyArgs),
    /// Level-set probes around a base polytope.
    Probe(ProbeArgs),
    /// Write a shape as OFF or as a JSON point list.
    Export(ExportArgs),
    /// Search n = 4..12 and compare with the reference constants.
    Table(TableArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub variance_max: Option<f64>,
    #[arg(long)]
    pub squeeze: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// OFF file, JSON point list or `builtin:<name>`.
    pub input: String,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    /// Family name, e.g. `n8` or `octahedron`.
    #[arg(long)]
    pub name: String,
    /// Comma-separated parameters; the reference values if omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Minimize over the parameters, starting from the reference values.
    #[arg(long)]
    pub optimize: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    /// Width of the certified parameter intervals.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    Singular,
    Convexity,
    Gradient,
    Rigidity,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalArg {
    Area,
    Volume,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long)]
    pub base: String,
    #[arg(long, value_enum)]
    pub mode: ProbeMode,
    /// Level of the functional; required by the singular and convexity modes.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, value_enum, default_value_t = FunctionalArg::Area)]
    pub functional: FunctionalArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Point for the gradient mode, `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// One-sided direction for the gradient mode, `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
    /// Perturbation radius for the rigidity mode.
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    /// Probe a single vertex; every vertex if omitted.
    #[arg(long)]
    pub vertex: Option<usize>,
    /// Free every vertex except the first three, which fix the similitude gauge.
    #[arg(long)]
    pub all_but_gauge: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Off,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    pub input: String,
    #[arg(long, value_enum, default_value_t = ExportFormat::Off)]
    pub format: ExportFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    /// First seed of the sweep.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of consecutive seeds swept per n.
    #[arg(long, default_value_t = 8)]
    pub seeds: u64,
    #[arg(long)]
    pub variance_max: Option<f64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Errors carry the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] polymin::Error),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use polymin::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::InvalidArgument(_)) => 2,
            CliError::Core(E::DegenerateInput(_) | E::DuplicatePoint(..) | E::Parse { .. }) => 3,
            CliError::Certification(_) | CliError::Core(E::NoSignChange { .. }) => 4,
            _ => 1,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("POLYMIN_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("POLYMIN_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = init_threads().and_then(|()| match &cli.command {
        Command::Search(a) => commands::search(a),
        Command::Eval(a) => commands::eval(a),
        Command::Family(a) => commands::family(a),
        Command::Verify(a) => commands::verify(a),
        Command::Probe(a) => commands::probe(a),
        Command::Export(a) => commands::export(a),
        Command::Table(a) => commands::table(a),
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
