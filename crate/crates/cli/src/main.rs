//! `kplane`: batch front end for the radial k-plane transform library.
//!
//! Exit codes: 0 success, 1 runtime failure or failed verification,
//! 2 usage or input error, 3 search stopped before converging.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod io;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kplane", version, about = "Radial k-plane transform: transforms, sharp constants, extremizer search, diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the transform to a sampled or preset profile.
    Transform(TransformArgs),
    /// Print the sharp constant A(k,d) or B(k,d) as JSON.
    Constant(ConstantArgs),
    /// Run the Euler–Lagrange extremizer search.
    Search(SearchArgs),
    /// Classify a profile sequence as tight, vanishing or dichotomous.
    Diagnose(DiagnoseArgs),
    /// Run numerical checks of the quantitative estimates.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone, Copy)]
pub struct GridArgs {
    /// Number of grid points.
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
    /// Largest radius covered by the grid; `inf` covers the half-line.
    #[arg(long, default_value_t = f64::INFINITY)]
    rmax: f64,
}

impl GridArgs {
    fn spec(&self) -> io::GridSpec {
        io::GridSpec { n: self.grid_n, rmax: self.rmax }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: u32,
    /// CSV profile with columns `r,value`.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    input: Option<PathBuf>,
    /// `extremizer`, `indicator:<a>` or `bump:<center>:<width>`.
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct ConstantArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: u32,
    #[arg(long, value_enum, ignore_case = true)]
    which: Which,
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: u32,
    /// `indicator`, `random:<seed>` or `file:<path>`.
    #[arg(long, default_value = "indicator")]
    init: String,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Skip re-centering each iterate in its dilation orbit.
    #[arg(long)]
    no_recenter: bool,
    #[command(flatten)]
    grid: GridArgs,
    /// Trace JSON (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final profile CSV.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    d: u32,
    /// Profile CSVs, in sequence order.
    #[arg(long, num_args = 1.., conflicts_with = "synthetic", required_unless_present = "synthetic")]
    inputs: Vec<PathBuf>,
    /// `tight`, `vanishing` or `dichotomy:<alpha>`.
    #[arg(long)]
    synthetic: Option<String>,
    /// Length of a synthetic sequence.
    #[arg(long)]
    len: Option<usize>,
    /// Tightness asks for a window holding `1 - eps` of the mass.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Rescale inputs to unit L^p mass instead of rejecting them.
    #[arg(long)]
    auto_normalize: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "concentration-k2")]
    ConcentrationK2,
    #[value(name = "concentration-k2-weighted")]
    ConcentrationK2Weighted,
    #[value(name = "concentration-k1")]
    ConcentrationK1,
    Slide,
    Superadd,
    Compactness,
    Truncation,
    Interaction,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Restrict a single suite to one (k, d); requires --d.
    #[arg(long, requires = "d")]
    k: Option<u32>,
    #[arg(long, requires = "k")]
    d: Option<u32>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// JSON-lines reports (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-suite summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn io(e: std::io::Error) -> Self {
        Failure::Runtime(format!("write failed: {e}"))
    }
}

impl From<kplane::Error> for Failure {
    fn from(e: kplane::Error) -> Self {
        match e {
            kplane::Error::Numerical(_) | kplane::Error::IterationAnomaly { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("KPLANE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("KPLANE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Transform(a) => commands::transform(&a),
        Command::Constant(a) => commands::constant(&a),
        Command::Search(a) => commands::search(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Verify(a) => suites::verify(&a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
