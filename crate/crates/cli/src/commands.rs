//! Subcommands of the `mfscp` binary.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfscp_core::baselines::greedy;
use mfscp_core::bench::{
    benchmark_name, reference_value, run_trials, BenchError, BenchReport, DEFAULT_TRIALS,
};
use mfscp_core::format::{parse_with, Detected};
use mfscp_core::mf::{estimate_tc_unicost, trace_csv, ParamError, UNICOST_ALPHA};
use mfscp_core::{emit, FormatKind, Overrides, ParseError, PenaltyMode, ScpInstance};
use thiserror::Error;

use crate::run::{run_solve, SolveConfig, SolveReport};
use crate::service::{ServiceConfig, DEFAULT_MAX_NNZ};

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mfscp", version, about = "Mean field annealing for the set covering problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run repeated trials over a directory or manifest of instances.
    Bench(BenchArgs),
    /// Convert between row and column ordering.
    Convert(ConvertArgs),
    /// Print instance statistics.
    Info(InfoArgs),
    /// Serve solve requests over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Row,
    Col,
    Auto,
}

impl FormatArg {
    pub fn kind(self) -> Option<FormatKind> {
        match self {
            FormatArg::Row => Some(FormatKind::RowOrdering),
            FormatArg::Col => Some(FormatKind::ColumnOrdering),
            FormatArg::Auto => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetFormat {
    Row,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    Multilinear,
    Piecewise,
}

/// Solver flags shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Annealing factor.
    #[arg(long)]
    pub k: Option<f64>,
    /// Penalty weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Start temperature.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Use the unicost parameter set regardless of costs.
    #[arg(long)]
    pub unicost: bool,
    #[arg(long, value_enum, default_value = "multilinear")]
    pub penalty: PenaltyArg,
    /// Truncation threshold; 0 disables, default is automatic.
    #[arg(long)]
    pub truncate: Option<f64>,
}

impl SolverArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            k_anneal: self.k,
            alpha: self.alpha,
            t0: self.t0,
            force_unicost: self.unicost,
            penalty_mode: match self.penalty {
                PenaltyArg::Multilinear => PenaltyMode::Multilinear,
                PenaltyArg::Piecewise => PenaltyMode::Piecewise,
            },
            trunc_eps: self.truncate,
            ..Overrides::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Complete and prune the result greedily.
    #[arg(long)]
    pub repair: bool,
    /// Write the temperature trace of the best trial as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the selected columns, 1-based, one per line.
    #[arg(long)]
    pub solution_out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Leave wall times out of the output.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Directory of instance files, or a manifest listing one path per line.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `builtin`, or a file of `name value` lines.
    #[arg(long, default_value = "builtin")]
    pub reference: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub from: FormatArg,
    #[arg(long, value_enum)]
    pub to: TargetFormat,
    /// Output path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Largest accepted number of nonzeros.
    #[arg(long, default_value_t = DEFAULT_MAX_NNZ)]
    pub max_nnz: usize,
    /// Simultaneous solves; defaults to the number of processing units.
    #[arg(long)]
    pub max_concurrent: Option<usize>,
    /// Largest accepted request body, in bytes.
    #[arg(long)]
    pub max_body: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("{name}: {source}")]
    Bench { name: String, source: BenchError },
    #[error("{0}: no instances found")]
    NoInstances(PathBuf),
    #[error("{path}:{line}: expected `name value`")]
    Reference { path: PathBuf, line: usize },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_instance(path: &Path, format: FormatArg) -> Result<Detected, CliError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    parse_with(&bytes, format.kind()).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out).map(|_| EXIT_FEASIBLE),
        Command::Convert(a) => cmd_convert(&a, out).map(|_| EXIT_FEASIBLE),
        Command::Info(a) => cmd_info(&a, out).map(|_| EXIT_FEASIBLE),
        Command::Serve(a) => cmd_serve(&a, err).map(|_| EXIT_FEASIBLE),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let detected = read_instance(&args.input, args.format)?;
    if detected.ambiguous {
        let _ = writeln!(
            err,
            "note: input also parses as column ordering; using row ordering (pass --format to choose)"
        );
    }
    let instance = &detected.instance;
    let config = SolveConfig {
        trials: args.trials,
        seed: args.seed,
        overrides: args.solver.overrides(),
        repair: args.repair,
    };
    let run = run_solve(instance, &config)?;

    if let Some(path) = &args.trace {
        fs::write(path, trace_csv(&run.trace)).map_err(io_err(path))?;
    }
    if let Some(path) = &args.solution_out {
        let text: String = run
            .solution
            .columns_one_based()
            .iter()
            .map(|c| format!("{c}\n"))
            .collect();
        fs::write(path, text).map_err(io_err(path))?;
    }

    let report = SolveReport::new(instance, detected.kind, &config, &run, false, !args.no_timing);
    let written = if args.json {
        writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))
    } else {
        write_solve_text(out, &report)
    };
    written.map_err(io_err(Path::new("<stdout>")))?;
    Ok(if report.feasible {
        EXIT_FEASIBLE
    } else {
        EXIT_INFEASIBLE
    })
}

fn write_solve_text(out: &mut dyn Write, r: &SolveReport) -> std::io::Result<()> {
    writeln!(out, "rows      {}", r.rows)?;
    writeln!(out, "columns   {}", r.cols)?;
    writeln!(out, "density   {:.4}", r.density)?;
    writeln!(out, "nonzeros  {}", r.nnz)?;
    writeln!(out, "format    {}", r.format)?;
    writeln!(out, "cost      {}", r.cost)?;
    writeln!(out, "feasible  {}", if r.feasible { "yes" } else { "no" })?;
    writeln!(out, "trials    {} (best seed {})", r.trials, r.best_seed)?;
    if r.repaired {
        writeln!(out, "repaired  yes")?;
    }
    if r.exhausted {
        writeln!(out, "warning   iteration caps reached before saturation")?;
    }
    if let Some(s) = r.wall_seconds {
        writeln!(out, "wall      {s:.3} s")?;
    }
    Ok(())
}

/// Lists instance files: every regular file of a directory, or the lines of a manifest.
pub fn instance_paths(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    if input.is_dir() {
        for entry in fs::read_dir(input).map_err(io_err(input))? {
            let path = entry.map_err(io_err(input))?.path();
            let hidden = path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with('.'));
            if path.is_file() && !hidden {
                paths.push(path);
            }
        }
        paths.sort();
    } else {
        let text = fs::read_to_string(input).map_err(io_err(input))?;
        let base = input.parent().unwrap_or(Path::new("."));
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let path = base.join(line);
            if !path.is_file() {
                return Err(CliError::Io {
                    path,
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "listed in manifest"),
                });
            }
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(CliError::NoInstances(input.to_path_buf()));
    }
    Ok(paths)
}

/// Display name of an instance file: the benchmark name when known, else the file stem.
pub fn instance_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    benchmark_name(&stem).unwrap_or(stem)
}

fn load_references(path: &Path) -> Result<Vec<(String, f64)>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut refs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
        let entry = match (parts.next(), parts.next().map(str::parse::<f64>)) {
            (Some(name), Some(Ok(value))) => (name.to_string(), value),
            _ => {
                return Err(CliError::Reference {
                    path: path.to_path_buf(),
                    line: i + 1,
                })
            }
        };
        refs.push(entry);
    }
    Ok(refs)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let paths = instance_paths(&args.input)?;
    let custom = match args.reference.as_str() {
        "builtin" => None,
        p => Some(load_references(Path::new(p))?),
    };
    let overrides = args.solver.overrides();
    let mut reports = Vec::with_capacity(paths.len());
    for path in &paths {
        let detected = read_instance(path, args.format)?;
        let name = instance_name(path);
        let report = run_trials(&detected.instance, &name, args.trials, args.seed, &overrides)
            .map_err(|source| CliError::Bench {
                name: name.clone(),
                source,
            })?;
        let reference = match &custom {
            None => reference_value(&name),
            Some(refs) => refs.iter().find(|(n, _)| *n == name).map(|(_, v)| *v),
        };
        reports.push(report.with_reference(reference));
    }
    let report = BenchReport::new(args.trials, reports);
    let timing = !args.no_timing;
    let text = if args.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else if args.csv {
        report.to_csv(timing)
    } else {
        report.to_text(timing)
    };
    out.write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let detected = read_instance(&args.input, args.from)?;
    let kind = match args.to {
        TargetFormat::Row => FormatKind::RowOrdering,
        TargetFormat::Col => FormatKind::ColumnOrdering,
    };
    let text = emit(&detected.instance, kind);
    match &args.output {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => out
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

#[derive(Debug, serde::Serialize)]
struct InfoReport {
    schema: u32,
    format: &'static str,
    ambiguous: bool,
    rows: usize,
    cols: usize,
    nnz: usize,
    density: f64,
    unicost: bool,
    min_cost: f64,
    max_cost: f64,
    min_row_cover: usize,
    max_row_cover: usize,
    greedy_cost: f64,
    tc_estimate: f64,
}

fn info_report(d: &Detected) -> InfoReport {
    let inst: &ScpInstance = &d.instance;
    let stats = inst.stats();
    let min = |xs: &[usize]| xs.iter().copied().min().unwrap_or(0);
    let max = |xs: &[usize]| xs.iter().copied().max().unwrap_or(0);
    InfoReport {
        schema: crate::run::SCHEMA_VERSION,
        format: d.kind.name(),
        ambiguous: d.ambiguous,
        rows: inst.n_rows(),
        cols: inst.n_cols(),
        nnz: inst.nnz(),
        density: stats.density,
        unicost: stats.unicost,
        min_cost: inst.costs().iter().copied().fold(f64::INFINITY, f64::min),
        max_cost: inst.costs().iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_row_cover: min(&stats.row_sums),
        max_row_cover: max(&stats.row_sums),
        greedy_cost: greedy(inst).cost,
        tc_estimate: estimate_tc_unicost(inst, UNICOST_ALPHA),
    }
}

pub fn cmd_info(args: &InfoArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let detected = read_instance(&args.input, args.format)?;
    let r = info_report(&detected);
    let written = if args.json {
        writeln!(out, "{}", serde_json::to_string(&r).expect("report serializes"))
    } else {
        (|| {
            writeln!(out, "format        {}{}", r.format, if r.ambiguous { " (ambiguous)" } else { "" })?;
            writeln!(out, "rows          {}", r.rows)?;
            writeln!(out, "columns       {}", r.cols)?;
            writeln!(out, "nonzeros      {}", r.nnz)?;
            writeln!(out, "density       {:.4}", r.density)?;
            writeln!(out, "unicost       {}", if r.unicost { "yes" } else { "no" })?;
            writeln!(out, "costs         {} .. {}", r.min_cost, r.max_cost)?;
            writeln!(out, "row cover     {} .. {}", r.min_row_cover, r.max_row_cover)?;
            writeln!(out, "greedy cost   {}", r.greedy_cost)?;
            writeln!(out, "Tc estimate   {:.4e}", r.tc_estimate)
        })()
    };
    written.map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_serve(args: &ServeArgs, err: &mut dyn Write) -> Result<(), CliError> {
    let mut config = ServiceConfig {
        max_nnz: args.max_nnz,
        ..ServiceConfig::default()
    };
    if let Some(n) = args.max_concurrent {
        config.max_concurrent = n.max(1);
    }
    if let Some(n) = args.max_body {
        config.max_body = n;
    }
    let _ = writeln!(err, "listening on {}", args.addr);
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
    runtime
        .block_on(crate::service::serve(args.addr, config))
        .map_err(CliError::Serve)
}
