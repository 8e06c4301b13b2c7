//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use tailbound_core::engine::comparison_from_report;
use tailbound_core::{
    phi_star, run_sweep, BoundReport, Instance, Method, SGrid, SolveConfig, Status, SweepSpec,
};
use thiserror::Error;

use crate::format::{
    comparison_json, emit_table, fmt_f64, json_f64, report_json, status_name, TableFormat,
};
use crate::lengths::{read_lengths_from, LengthsError};
use crate::selfcheck::run_selfcheck;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tailbound",
    version,
    about = "Worst-case Chernoff tail bounds for sums of bounded variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound P(S >= s) over all laws with the given lengths and mean.
    Bound(BoundArgs),
    /// Like `bound`, plus the general Hoeffding bound and their log10 ratio.
    Compare(BoundArgs),
    /// Conservative p-value for the hypothesis E[S] = mu0.
    Pvalue(PvalueArgs),
    /// Sample lengths on a simplex and sweep thresholds for several means.
    Sweep(SweepArgs),
    /// Run the oracle-based invariant checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Joint,
    Nested,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Joint => Method::Joint2D,
            MethodArg::Nested => Method::NestedBisection,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Interval lengths, one per line or a JSON array; `-` reads stdin.
    #[arg(long, value_name = "PATH")]
    b_file: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, value_enum, default_value = "nested")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PvalueArgs {
    #[arg(long, value_name = "PATH")]
    b_file: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    mu0: f64,
    #[arg(long, allow_negative_numbers = true)]
    s_obs: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    total: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.8,0.9,0.95",
        allow_negative_numbers = true
    )]
    mus: Vec<f64>,
    #[arg(long, default_value_t = 60)]
    s_count: usize,
    /// First threshold; defaults to each mean.
    #[arg(long)]
    s_start: Option<f64>,
    /// Last threshold; defaults to 0.995 times the total.
    #[arg(long)]
    s_stop: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "nested")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormatArg,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<tailbound_core::Error> for CliError {
    fn from(e: tailbound_core::Error) -> Self {
        match e {
            tailbound_core::Error::BracketFailure { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn load_lengths(path: &Path) -> Result<Vec<f64>, CliError> {
    read_lengths_from(path).map_err(|e| match e {
        LengthsError::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
        other => CliError::Validation(format!("{}: {other}", path.display())),
    })
}

fn write_output(out: Option<&Path>, text: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn render(map: serde_json::Map<String, Value>, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
            text.push('\n');
            text.into_bytes()
        }
        ReportFormat::Text => {
            let mut text = String::new();
            for (key, value) in flatten(&map, "") {
                text.push_str(&format!("{key}: {value}\n"));
            }
            text.into_bytes()
        }
    }
}

fn flatten(map: &serde_json::Map<String, Value>, prefix: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, v) in map {
        let key = format!("{prefix}{k}");
        match v {
            Value::Object(inner) => out.extend(flatten(inner, &format!("{key}."))),
            Value::Number(n) => out.push((key, fmt_f64(n.as_f64().unwrap_or(f64::NAN)))),
            Value::String(s) => out.push((key, s.clone())),
            Value::Null => out.push((key, "none".into())),
            other => out.push((key, other.to_string())),
        }
    }
    out
}

fn solve(inst: &Instance, method: Method) -> Result<BoundReport, CliError> {
    Ok(phi_star(inst, method, &SolveConfig::default())?)
}

fn solver_code(status: Status, stderr: &mut dyn Write) -> i32 {
    if status == Status::Converged {
        EXIT_OK
    } else {
        let _ = writeln!(
            stderr,
            "warning: solver did not converge ({})",
            status_name(status)
        );
        EXIT_SOLVER
    }
}

fn cmd_bound(
    args: &BoundArgs,
    compare: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let b = load_lengths(&args.b_file)?;
    let inst = Instance::new(b, args.mu, args.s)?;
    let report = solve(&inst, args.method.into())?;
    let map = if compare {
        comparison_json(&report, &comparison_from_report(&inst, &report))
    } else {
        report_json(&report)
    };
    write_output(args.out.as_deref(), &render(map, args.format), stdout)?;
    Ok(solver_code(report.solver.status, stderr))
}

fn cmd_pvalue(
    args: &PvalueArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let b = load_lengths(&args.b_file)?;
    let inst = Instance::new(b, args.mu0, args.s_obs)?;
    let report = solve(&inst, Method::default())?;
    let mut map = serde_json::Map::new();
    map.insert("p_value".into(), json_f64(report.bound));
    map.insert("mu0".into(), json_f64(args.mu0));
    map.insert("s_obs".into(), json_f64(args.s_obs));
    map.insert("status".into(), status_name(report.solver.status).into());
    write_output(args.out.as_deref(), &render(map, args.format), stdout)?;
    Ok(solver_code(report.solver.status, stderr))
}

fn cmd_sweep(
    args: &SweepArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let spec = SweepSpec {
        n_vars: args.n,
        total_length: args.total,
        mus: args.mus.clone(),
        s_grid: SGrid {
            start: args.s_start,
            stop: args.s_stop.unwrap_or(0.995 * args.total),
            count: args.s_count,
        },
        seed: args.seed,
        method: args.method.into(),
    };
    let rows = run_sweep(&spec)?;
    let format = match args.format {
        TableFormatArg::Csv => TableFormat::Csv,
        TableFormatArg::Json => TableFormat::Json,
    };
    let mut buf = Vec::new();
    emit_table(&rows, format, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    write_output(args.out.as_deref(), &buf, stdout)?;
    let bad: Vec<_> = rows
        .iter()
        .filter(|r| r.status != Status::Converged)
        .collect();
    if bad.is_empty() {
        return Ok(EXIT_OK);
    }
    for r in &bad {
        let _ = writeln!(
            stderr,
            "warning: mu={} s={}: {}",
            fmt_f64(r.mu),
            fmt_f64(r.s),
            status_name(r.status)
        );
    }
    Ok(EXIT_SOLVER)
}

fn cmd_selfcheck(args: &SelfcheckArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let outcomes = run_selfcheck(args.seed);
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&format!(
            "{} {}: {} passed, {} failed (worst {})\n",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.cases - o.failures,
            o.failures,
            fmt_f64(o.worst)
        ));
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        outcomes.len() - failed,
        outcomes.len()
    ));
    write_output(None, text.as_bytes(), stdout)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn parse_and_dispatch<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_VALIDATION
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a, false, stdout, stderr),
        Command::Compare(a) => cmd_bound(a, true, stdout, stderr),
        Command::Pvalue(a) => cmd_pvalue(a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Selfcheck(a) => cmd_selfcheck(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}
