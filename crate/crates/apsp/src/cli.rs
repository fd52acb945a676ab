//! The `apsp` command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apsp_core::verify::VerifyOptions;
use apsp_core::{
    detect_negative_cycle, generate, gflops, verify_solution, AnyDistanceMatrix, DType, GraphGenSpec, MatrixError,
    PlanError, VerifyReport,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bench::{run_sweep_with, BenchConfig, ConfigError, DirectSolver, MonotonicClock};
use crate::io::{load_distances, load_predecessors, save_distances, save_predecessors, IoError};
use crate::report::{parse_records, render, ReportError, ReportFormat};
use crate::solver::{default_threads, solve_any, SolveError, SolveOptions, SolveSpec, SolverKind, DEFAULT_TB};
use crate::tune::{autotune_tb, TuneConfig};

pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const FORMAT: u8 = 4;
    pub const VERIFY: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "apsp", version, about = "Blocked Floyd-Warshall all-pairs shortest paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random graph as a distance matrix.
    Generate(GenerateArgs),
    /// Solve a distance matrix and print one timing line.
    Solve(SolveArgs),
    /// Check a solution against the oracles.
    Verify(VerifyArgs),
    /// Run a timed sweep and print a report.
    Bench(BenchArgs),
    /// Time candidate tile sizes and print the fastest.
    Tune(TuneArgs),
    /// Re-render a CSV or JSON bench report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DTypeArg {
    F32,
    F64,
}

impl From<DTypeArg> for DType {
    fn from(d: DTypeArg) -> Self {
        match d {
            DTypeArg::F32 => DType::F32,
            DTypeArg::F64 => DType::F64,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub wmin: u32,
    #[arg(long, default_value_t = 100)]
    pub wmax: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DTypeArg::F32)]
    pub dtype: DTypeArg,
    /// Output path; `.csv` selects the text format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverKind::Blocked)]
    pub solver: SolverKind,
    #[arg(long, default_value_t = DEFAULT_TB)]
    pub tb: usize,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Pad n up to a multiple of tb instead of refusing.
    #[arg(long)]
    pub pad: bool,
    #[arg(long)]
    pub out_dist: Option<PathBuf>,
    #[arg(long)]
    pub out_pred: Option<PathBuf>,
    /// Element type of a CSV input.
    #[arg(long, value_enum, default_value_t = DTypeArg::F64)]
    pub csv_dtype: DTypeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// The unsolved input matrix.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Sampled pairs for path checks above 256 vertices.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = VerifyFormat::Text)]
    pub format: VerifyFormat,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DTypeArg::F64)]
    pub csv_dtype: DTypeArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON bench configuration; sweep flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub tbs: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub threads: Option<Vec<usize>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub dtypes: Option<Vec<DTypeArg>>,
    /// Timed repetitions per point [default: 15]
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub pad: bool,
    /// Check the first timed result of points with n <= 512.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64, 128])]
    pub tbs: Vec<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = DTypeArg::F32)]
    pub dtype: DTypeArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub pad: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// CSV or JSON written by `bench`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Format(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(IoError::Io { .. }) => exit::IO,
            CliError::Io(IoError::Format { .. }) | CliError::Format(_) => exit::FORMAT,
            CliError::Verify(_) => exit::VERIFY,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Plan(PlanError::TileDoesNotDivide { n, tb }) => {
                CliError::Usage(format!("tile size {tb} does not divide n = {n}; rerun with --pad"))
            }
            SolveError::Plan(p) => CliError::Usage(p.to_string()),
            SolveError::Matrix(m @ MatrixError::NaN { .. }) => CliError::Format(m.to_string()),
            SolveError::Matrix(m) => CliError::Usage(m.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::UnknownFormat(_) => CliError::Usage(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

fn io_err(path: &Path, source: io::Error) -> CliError {
    CliError::Io(IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses the process arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Tune(a) => cmd_tune(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(v)
}

fn threads_or_default(t: Option<usize>) -> Result<usize, CliError> {
    t.map_or(Ok(default_threads()), |t| positive("threads", t))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = GraphGenSpec::new(a.n, a.seed)
        .with_density(a.density)
        .with_weights(a.wmin, a.wmax);
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let matrix: AnyDistanceMatrix = match DType::from(a.dtype) {
        DType::F32 => generate::<f32>(&spec).map(Into::into),
        DType::F64 => generate::<f64>(&spec).map(Into::into),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    save_distances(&a.out, &matrix)?;
    emit(
        out,
        &format!(
            "generate n={} density={} seed={} dtype={} out={}\n",
            a.n,
            a.density,
            a.seed,
            DType::from(a.dtype),
            a.out.display()
        ),
    )
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = load_distances(&a.input, a.csv_dtype.into())?;
    let n = input.n();
    let threads = threads_or_default(a.threads)?;
    let spec = SolveSpec {
        solver: a.solver,
        tb: positive("tb", a.tb)?,
        threads,
        pad: a.pad,
        options: SolveOptions::default(),
    };
    let result = solve_any(&input, &spec)?;
    let cycle = match &result.distances {
        AnyDistanceMatrix::F32(d) => detect_negative_cycle(d),
        AnyDistanceMatrix::F64(d) => detect_negative_cycle(d),
    };
    if let Some(v) = cycle {
        return Err(CliError::Verify(format!(
            "negative cycle through vertex {v}; no output written"
        )));
    }
    if let Some(path) = &a.out_dist {
        save_distances(path, &result.distances)?;
    }
    if let Some(path) = &a.out_pred {
        save_predecessors(path, &result.predecessors)?;
    }
    let rate = gflops(n, result.wall_time).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(
        out,
        &format!(
            "solve n={n} solver={} tb={} threads={threads} time_s={:.9} gflops={:.6}\n",
            a.solver.token(),
            spec.effective_tb(n),
            result.wall_time,
            rate
        ),
    )
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let csv_dtype = a.csv_dtype.into();
    let input = load_distances(&a.input, csv_dtype)?;
    let dist = load_distances(&a.dist, input.dtype())?;
    let pred = load_predecessors(&a.pred)?;
    let options = VerifyOptions {
        samples: a.samples,
        seed: a.seed,
        ..VerifyOptions::default()
    };
    let report: VerifyReport = match (&input, &dist) {
        (AnyDistanceMatrix::F32(i), AnyDistanceMatrix::F32(d)) => verify_solution(i, d, &pred, &options),
        (AnyDistanceMatrix::F64(i), AnyDistanceMatrix::F64(d)) => verify_solution(i, d, &pred, &options),
        _ => {
            return Err(CliError::Format(format!(
                "element types differ: input is {}, distances are {}",
                input.dtype(),
                dist.dtype()
            )))
        }
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
    if let Some(path) = &a.report {
        fs::write(path, &json).map_err(|e| io_err(path, e))?;
    }
    match a.format {
        VerifyFormat::Text => emit(out, &report.to_text())?,
        VerifyFormat::Json => emit(out, &json)?,
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn bench_config(a: &BenchArgs) -> Result<BenchConfig, CliError> {
    let mut c = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?
        }
        None => BenchConfig::default(),
    };
    if let Some(v) = &a.sizes {
        c.sizes = v.clone();
    }
    if let Some(v) = &a.tbs {
        c.tile_sizes = v.clone();
    }
    if let Some(v) = &a.threads {
        c.thread_counts = v.clone();
    }
    if let Some(v) = &a.dtypes {
        c.elem_types = v.iter().map(|&d| d.into()).collect();
    }
    c.reps = a.reps.unwrap_or(c.reps);
    c.seed = a.seed.unwrap_or(c.seed);
    c.solver = a.solver.unwrap_or(c.solver);
    c.density = a.density.unwrap_or(c.density);
    c.pad |= a.pad;
    c.verify |= a.verify;
    Ok(c)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = bench_config(&a)?;
    let sweep = run_sweep_with(&config, &mut MonotonicClock::default(), &mut DirectSolver, |p| {
        eprintln!("bench n={} tb={} threads={} dtype={}", p.n, p.tb, p.threads, p.dtype);
    })
    .map_err(|e: ConfigError| CliError::Usage(e.to_string()))?;
    for f in &sweep.failures {
        let p = f.point;
        eprintln!(
            "failed n={} tb={} threads={} dtype={}: {}",
            p.n, p.tb, p.threads, p.dtype, f.error
        );
    }
    if !sweep.records.is_empty() {
        let text = render(&sweep.records, a.format)?;
        match &a.out {
            Some(path) => fs::write(path, text).map_err(|e| io_err(path, e))?,
            None => emit(out, &text)?,
        }
    }
    if sweep.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Internal(format!(
            "{} sweep point(s) failed",
            sweep.failures.len()
        )))
    }
}

fn cmd_tune(a: TuneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = TuneConfig {
        dtype: a.dtype.into(),
        seed: a.seed,
        pad: a.pad,
        ..TuneConfig::new(positive("n", a.n)?, threads_or_default(a.threads)?)
    };
    let result = autotune_tb(&config, &a.tbs)?;
    let mut text = String::new();
    for t in &result.timings {
        text += &format!(
            "tune n={} tb={} threads={} time_s={:.9}\n",
            a.n, t.tb, config.threads, t.time_s
        );
    }
    text += &format!("best tb={}\n", result.best);
    emit(out, &text)
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.input).map_err(|e| io_err(&a.input, e))?;
    let records = parse_records(&text)?;
    emit(out, &render(&records, a.format)?)
}
