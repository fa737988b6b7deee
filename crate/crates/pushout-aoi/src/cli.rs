//! `pushout-aoi` command line.
//!
//! Exit status: 0 success (all metrics pass), 1 validation failure or
//! runtime I/O error, 2 usage error, 3 no successful departures
//! (`P(X > S) ≈ 0`), 4 quadrature oracle did not converge.

use crate::format::sig;
use crate::harness::{self, Family, ValidateConfig};
use crate::records;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use pushout_aoi_core::analytic::AnalyticReport;
use pushout_aoi_core::dist::{DistributionSpec, OracleConfig};
use pushout_aoi_core::sim::{self, EstimateWithCI, ModelSpec, SimConfig};
use pushout_aoi_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

pub const DEFAULT_CYCLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_DELTA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Fail = 1,
    Usage = 2,
    Diverges = 3,
    Oracle = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Model(#[from] CoreError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) => Exit::Usage,
            CliError::Model(e) => match e {
                CoreError::FreshnessDiverges(_) | CoreError::DegeneratePair => Exit::Diverges,
                CoreError::OracleNotConverged { .. } => Exit::Oracle,
                CoreError::InvalidParameter(_) | CoreError::InsufficientCycles { .. } => Exit::Usage,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => Exit::Fail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Analyze,
    Validate,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub family: Family,
    pub rho: Vec<f64>,
    pub delta: f64,
}

/// Fully resolved invocation; also the schema of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
    #[serde(default = "default_cycles")]
    pub n_cycles: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// `None` writes to standard output.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Cycle-record CSV destination (`simulate` only).
    #[serde(default)]
    pub records: Option<PathBuf>,
    #[serde(default)]
    pub json: bool,
}

fn default_cycles() -> usize {
    DEFAULT_CYCLES
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Parses `law:p1[,p2]` with laws `det`, `exp`, `unif`, `gamma`.
pub fn parse_distribution(text: &str) -> Result<DistributionSpec, String> {
    let (name, params) = text
        .split_once(':')
        .ok_or_else(|| format!("expected law:param[,param], got `{text}`"))?;
    let values = params
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}` in `{text}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = match (name.trim(), values.as_slice()) {
        ("det", &[v]) => DistributionSpec::deterministic(v),
        ("exp", &[r]) => DistributionSpec::exponential(r),
        ("unif", &[a, b]) => DistributionSpec::uniform(a, b),
        ("gamma", &[k, r]) => DistributionSpec::gamma(k, r),
        ("det" | "exp", _) => return Err(format!("`{name}` takes one parameter")),
        ("unif" | "gamma", _) => return Err(format!("`{name}` takes two parameters")),
        _ => return Err(format!("unknown law `{name}` (det, exp, unif, gamma)")),
    };
    spec.map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pushout-aoi", version, about = "Age of information of the bufferless push-out GI/GI/1/1 server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form stationary averages.
    Analyze(ModelArgs),
    /// Regenerative simulation with confidence intervals.
    Simulate(ModelArgs),
    /// Simulation against closed forms; exit 1 if any metric fails.
    Validate(ModelArgs),
    /// Validation over a grid of loads for the D/M or M/M family, as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Interarrival law X, e.g. `exp:1`, `det:2`, `unif:0,2`, `gamma:2,2`.
    #[arg(long = "x", value_name = "LAW", value_parser = parse_distribution, conflicts_with = "config")]
    x: Option<DistributionSpec>,
    /// Service law S.
    #[arg(long = "s", value_name = "LAW", value_parser = parse_distribution, conflicts_with = "config")]
    s: Option<DistributionSpec>,
    /// Write every cycle record to this CSV (simulate).
    #[arg(long, value_name = "PATH")]
    records: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, conflicts_with = "config")]
    family: Option<Family>,
    /// Loads ρ = β/δ, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "config")]
    rho: Vec<f64>,
    /// Service rate δ.
    #[arg(long, conflicts_with = "config")]
    delta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Number of regeneration cycles.
    #[arg(long, value_name = "N")]
    cycles: Option<usize>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Quadrature oracle tolerance.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Read the run configuration from a JSON file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    dump_config: bool,
    /// Structured JSON output instead of CSV/text.
    #[arg(long)]
    json: bool,
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: RunConfig,
    pub dump_config: bool,
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(Cli::command().error(kind, msg))
}

/// Parses and validates a command line (`argv[0]` is the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (kind, common) = match &cli.command {
        Command::Analyze(a) => (CommandKind::Analyze, &a.common),
        Command::Simulate(a) => (CommandKind::Simulate, &a.common),
        Command::Validate(a) => (CommandKind::Validate, &a.common),
        Command::Sweep(a) => (CommandKind::Sweep, &a.common),
    };

    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(ErrorKind::Io, format!("cannot read {}: {e}", path.display())))?;
            let cfg: RunConfig = serde_json::from_str(&text)
                .map_err(|e| usage(ErrorKind::InvalidValue, format!("bad config {}: {e}", path.display())))?;
            if cfg.command != kind {
                return Err(usage(
                    ErrorKind::ArgumentConflict,
                    format!("config file is for `{:?}`, not `{kind:?}`", cfg.command).to_lowercase(),
                ));
            }
            cfg
        }
        None => {
            let (model, sweep) = match &cli.command {
                Command::Sweep(a) => {
                    let family = a
                        .family
                        .ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "sweep needs --family"))?;
                    if a.rho.is_empty() {
                        return Err(usage(ErrorKind::MissingRequiredArgument, "sweep needs --rho"));
                    }
                    let grid = SweepGrid { family, rho: a.rho.clone(), delta: a.delta.unwrap_or(DEFAULT_DELTA) };
                    (None, Some(grid))
                }
                Command::Analyze(a) | Command::Simulate(a) | Command::Validate(a) => {
                    let x = a.x.ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "missing --x (or --config)"))?;
                    let s = a.s.ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "missing --s (or --config)"))?;
                    (Some(ModelSpec { interarrival: x, service: s }), None)
                }
            };
            RunConfig {
                command: kind,
                model,
                sweep,
                n_cycles: DEFAULT_CYCLES,
                seed: DEFAULT_SEED,
                tol: DEFAULT_TOL,
                out: None,
                records: None,
                json: false,
            }
        }
    };

    if let Some(n) = common.cycles {
        config.n_cycles = n;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tol) = common.tol {
        config.tol = tol;
    }
    if common.out.is_some() {
        config.out = common.out.clone();
    }
    if common.json {
        config.json = true;
    }
    if let Command::Analyze(a) | Command::Simulate(a) | Command::Validate(a) = &cli.command {
        if a.records.is_some() {
            config.records = a.records.clone();
        }
    }
    check(&config)?;
    Ok(Invocation { config, dump_config: common.dump_config })
}

fn check(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.n_cycles < 1 {
        return Err(usage(ErrorKind::InvalidValue, "--cycles must be at least 1"));
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(usage(ErrorKind::InvalidValue, "--tol must be positive"));
    }
    match cfg.command {
        CommandKind::Sweep => {
            let grid = cfg
                .sweep
                .as_ref()
                .ok_or_else(|| usage(ErrorKind::MissingRequiredArgument, "sweep config needs a `sweep` grid"))?;
            if cfg.model.is_some() {
                return Err(usage(ErrorKind::ArgumentConflict, "sweep takes a grid, not a model"));
            }
            if grid.rho.is_empty() || grid.rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(usage(ErrorKind::InvalidValue, "--rho needs positive values"));
            }
            if !(grid.delta.is_finite() && grid.delta > 0.0) {
                return Err(usage(ErrorKind::InvalidValue, "--delta must be positive"));
            }
        }
        _ => {
            if cfg.model.is_none() {
                return Err(usage(ErrorKind::MissingRequiredArgument, "a model (--x/--s or config) is required"));
            }
            if cfg.sweep.is_some() {
                return Err(usage(ErrorKind::ArgumentConflict, "only sweep takes a grid"));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyticRow {
    zeta: f64,
    mean_min: f64,
    delta_bar: f64,
    aoi_bar: f64,
    mean_cycle: f64,
    throughput: f64,
    method: &'static str,
}

impl From<&AnalyticReport> for AnalyticRow {
    fn from(r: &AnalyticReport) -> Self {
        Self {
            zeta: sig(r.zeta),
            mean_min: sig(r.mean_min),
            delta_bar: sig(r.delta_bar),
            aoi_bar: sig(r.aoi_bar),
            mean_cycle: sig(r.mean_cycle),
            throughput: sig(r.throughput),
            method: r.method.as_str(),
        }
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    n_cycles: usize,
    seed: u64,
    delta_bar: EstimateWithCI,
    aoi_bar: EstimateWithCI,
    throughput: EstimateWithCI,
    mean_cycle: EstimateWithCI,
}

fn rounded(e: EstimateWithCI) -> EstimateWithCI {
    EstimateWithCI { point: sig(e.point), half_width: sig(e.half_width), ..e }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn oracle(cfg: &RunConfig) -> OracleConfig {
    OracleConfig { tol: cfg.tol, ..OracleConfig::default() }
}

/// Runs a resolved invocation, writing its output.
pub fn execute(inv: &Invocation) -> Result<Exit, CliError> {
    let cfg = &inv.config;
    if inv.dump_config {
        let mut out = output(&cfg.out)?;
        serde_json::to_writer_pretty(&mut out, cfg)?;
        writeln!(out)?;
        return Ok(Exit::Pass);
    }
    let validate_cfg = ValidateConfig { oracle: oracle(cfg), ..ValidateConfig::default() };
    match cfg.command {
        CommandKind::Analyze => {
            let model = cfg.model.as_ref().expect("checked");
            let report = AnalyticReport::evaluate(&model.interarrival, &model.service, &oracle(cfg))?;
            let mut out = output(&cfg.out)?;
            let row = AnalyticRow::from(&report);
            if cfg.json {
                serde_json::to_writer_pretty(&mut out, &row)?;
                writeln!(out)?;
            } else {
                let mut w = csv::Writer::from_writer(out);
                w.serialize(row)?;
                w.flush()?;
            }
            Ok(Exit::Pass)
        }
        CommandKind::Simulate => {
            let model = cfg.model.as_ref().expect("checked");
            let sim_cfg = SimConfig { oracle: oracle(cfg), ..SimConfig::default() };
            let recs = sim::run_cycles_with(model, cfg.n_cycles, cfg.seed, &sim_cfg)?;
            if let Some(path) = &cfg.records {
                records::write_records(BufWriter::new(File::create(path)?), &recs)?;
            }
            let summary = SimulationSummary {
                n_cycles: recs.len(),
                seed: cfg.seed,
                delta_bar: rounded(sim::estimate_delta_bar(&recs)?),
                aoi_bar: rounded(sim::estimate_aoi_bar(&recs)?),
                throughput: rounded(sim::estimate_throughput(&recs)?),
                mean_cycle: rounded(sim::estimate_mean_cycle(&recs)?),
            };
            let mut out = output(&cfg.out)?;
            serde_json::to_writer_pretty(&mut out, &summary)?;
            writeln!(out)?;
            Ok(Exit::Pass)
        }
        CommandKind::Validate => {
            let model = cfg.model.as_ref().expect("checked");
            let report = harness::validate(model, cfg.n_cycles, cfg.seed, &validate_cfg)?;
            let mut out = output(&cfg.out)?;
            if cfg.json {
                serde_json::to_writer_pretty(&mut out, &report.rounded())?;
                writeln!(out)?;
            } else {
                write!(out, "{}", report.render_text())?;
            }
            Ok(if report.passed() { Exit::Pass } else { Exit::Fail })
        }
        CommandKind::Sweep => {
            let grid = cfg.sweep.as_ref().expect("checked");
            let rows = harness::sweep(grid.family, &grid.rho, grid.delta, cfg.n_cycles, cfg.seed, &validate_cfg)?;
            harness::write_sweep_csv(output(&cfg.out)?, &rows)?;
            Ok(if rows.iter().all(|r| r.pass) { Exit::Pass } else { Exit::Fail })
        }
    }
}

fn report_error(err: &CliError) {
    match err {
        CliError::Usage(e) => {
            let _ = e.print();
        }
        CliError::Model(CoreError::FreshnessDiverges(why)) => {
            eprintln!("error: model never completes a service, ζ = P(X>S) ≈ 0 ({why})");
        }
        other => eprintln!("error: {other}"),
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let result = parse_args(std::env::args_os()).and_then(|inv| execute(&inv));
    match result {
        Ok(exit) => exit.into(),
        Err(CliError::Usage(e)) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            Exit::Pass.into()
        }
        Err(e) => {
            report_error(&e);
            e.exit().into()
        }
    }
}
