//! Output formats: sweep tables as CSV or JSON, and bound reports as JSON.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};
use tailbound_core::{BoundReport, ComparisonRow, EdgeCase, Method, Status, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "mu,s,bound_new,bound_hoeffding,log10_ratio";

/// Shortest decimal that parses back to the same `f64`, using exponent
/// notation only when it is shorter. Non-finite values print as `inf`,
/// `-inf` and `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let plain = format!("{v}");
    let exp = format!("{v:e}");
    if exp.len() < plain.len() {
        exp
    } else {
        plain
    }
}

/// A JSON number, or the [`fmt_f64`] string for non-finite values.
pub fn json_f64(v: f64) -> Value {
    match serde_json::Number::from_f64(v) {
        Some(n) => Value::Number(n),
        None => Value::String(fmt_f64(v)),
    }
}

pub fn method_name(method: Method) -> &'static str {
    match method {
        Method::Joint2D => "joint",
        Method::NestedBisection => "nested",
    }
}

pub fn status_name(status: Status) -> &'static str {
    match status {
        Status::Converged => "converged",
        Status::MaxIterations => "max_iterations",
        Status::BracketFailure => "bracket_failure",
    }
}

pub fn edge_case_name(edge: EdgeCase) -> &'static str {
    match edge {
        EdgeCase::TrivialOne => "TrivialOne",
        EdgeCase::TrivialZero => "TrivialZero",
        EdgeCase::DegenerateMean => "DegenerateMean",
        EdgeCase::UpperEndpoint => "UpperEndpoint",
    }
}

pub fn report_json(report: &BoundReport) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("log_bound".into(), json_f64(report.log_bound));
    map.insert("bound".into(), json_f64(report.bound));
    map.insert(
        "dual".into(),
        json!({ "t": json_f64(report.dual.t), "lambda": json_f64(report.dual.lambda) }),
    );
    map.insert("method".into(), method_name(report.method).into());
    map.insert(
        "solver".into(),
        json!({
            "iterations": report.solver.iterations,
            "status": status_name(report.solver.status),
        }),
    );
    map.insert(
        "edge_case".into(),
        report
            .edge_case
            .map_or(Value::Null, |e| edge_case_name(e).into()),
    );
    map
}

pub fn comparison_json(report: &BoundReport, row: &ComparisonRow) -> Map<String, Value> {
    let mut map = report_json(report);
    map.insert("bound_hoeffding".into(), json_f64(row.bound_hoeffding));
    map.insert("log10_ratio".into(), json_f64(row.log_ratio));
    map
}

#[derive(Serialize)]
struct JsonRow {
    mu: Value,
    s: Value,
    bound_new: Value,
    bound_hoeffding: Value,
    log10_ratio: Value,
}

/// Writes sweep rows. Identical rows always produce identical bytes.
pub fn emit_table<W: Write>(rows: &[SweepRow], format: TableFormat, out: &mut W) -> io::Result<()> {
    match format {
        TableFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_f64(r.mu),
                    fmt_f64(r.s),
                    fmt_f64(r.bound_new),
                    fmt_f64(r.bound_hoeffding),
                    fmt_f64(r.log10_ratio)
                )?;
            }
        }
        TableFormat::Json => {
            let rows: Vec<JsonRow> = rows
                .iter()
                .map(|r| JsonRow {
                    mu: json_f64(r.mu),
                    s: json_f64(r.s),
                    bound_new: json_f64(r.bound_new),
                    bound_hoeffding: json_f64(r.bound_hoeffding),
                    log10_ratio: json_f64(r.log10_ratio),
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
