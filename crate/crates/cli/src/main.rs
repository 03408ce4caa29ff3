//! Command-line front end: every simulator and analysis surface behind a
//! subcommand, with reproducible seeds echoed into every output and atomic
//! file writes.

mod cmd;
mod out;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Configuration problems exit with 2, runtime failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hypercollapse",
    version,
    about = "Vertex-identifiability collapse in Poisson random hypergraphs: \
             thresholds, fluid limits, exact simulation and Monte Carlo drivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate z* and the tangential zeros of the threshold function
    Threshold(ThresholdArgs),
    /// Emit the fluid path (t, x1, x2, x3, sigma_sq) and limiting constants
    Fluid(FluidArgs),
    /// Sample a Poisson hypergraph into the edge-list text format
    Sample(SampleArgs),
    /// Sample one hypergraph and collapse it, exporting the step trace
    Collapse(CollapseArgs),
    /// Run the embedded (Y, Z) Markov chain, exporting the trajectory
    Chain(ChainArgs),
    /// Run many trials of either engine and summarize against the limits
    Experiment(ExperimentArgs),
    /// Draw from the critical-case limit law of the collapse fraction
    Zlaw(ZlawArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Engine {
    Full,
    Chain,
}

/// Flags shared by every subcommand. A JSON config file may supply any of
/// these; explicit flags take precedence, and the merged configuration is
/// echoed into every output.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Inline JSON array of coefficients, or a path to a file holding one
    #[arg(long)]
    beta: Option<String>,
    /// Series preset: example21:<p>,<alpha> or example22:<alpha>
    #[arg(long)]
    preset: Option<String>,
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of vertices N
    #[arg(long)]
    n: Option<usize>,
    /// Number of trials (or samples, for zlaw)
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; per-trial streams derive from it
    #[arg(long)]
    seed: Option<u64>,
    /// Simulator for experiment mode
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Output path; stdout when omitted. File outputs get a sibling
    /// .manifest.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Data format where both make sense
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for trials; 0 = default, 1 = sequential
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Attach this many (t, f(t)) samples to the report
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct FluidArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of grid points
    #[arg(long, default_value_t = 1001)]
    points: usize,
    /// Upper end of the grid; defaults to min(z*, 1)
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CollapseArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ZlawArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Classification tolerance for the mass report
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Threshold(args) => cmd::threshold(&args.common, args.grid),
        Command::Fluid(args) => cmd::fluid(&args.common, args.points, args.t_max),
        Command::Sample(args) => cmd::sample(&args.common),
        Command::Collapse(args) => cmd::collapse(&args.common),
        Command::Chain(args) => cmd::chain(&args.common),
        Command::Experiment(args) => cmd::experiment(&args.common),
        Command::Zlaw(args) => cmd::zlaw(&args.common, args.tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("hypercollapse: {err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(3),
            }
        }
    }
}
