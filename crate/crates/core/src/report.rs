//! JSON and CSV rendering of every result type.
//!
//! JSON output wraps the result in `{command, config, result}` so a report
//! carries the configuration that produced it. CSV output is flat and
//! plot-ready; it has a header row even when there are no data rows.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::conditions::{ConditionReport, ConditionVerdict, Decision};
use crate::config::{Format, RunConfig};
use crate::optimizer::{OptResult, ParetoPoint};
use crate::scenario::ValidationReport;
use crate::sim::{SensitivityResult, SweepStats};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy)]
pub enum Payload<'a> {
    Validation(&'a ValidationReport),
    Decision(&'a Decision),
    Conditions(&'a ConditionReport),
    Optimize(&'a OptResult),
    Frontier(&'a [ParetoPoint]),
    Sweep(&'a SweepStats),
    Sensitivity(&'a SensitivityResult),
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    result: T,
}

fn json<T: Serialize>(command: &str, config: &RunConfig, result: T) -> Result<String, ReportError> {
    let mut text = serde_json::to_string_pretty(&Envelope { command, config, result })?;
    text.push('\n');
    Ok(text)
}

pub const FRONTIER_HEADER: [&str; 7] = ["cost", "capital", "B_b", "B_s", "B_i", "B_n", "state"];

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn verdict_row(set: &str, v: &ConditionVerdict) -> Vec<String> {
    let side = |e: &Option<crate::calculus::ExtendedValue>| e.map(|e| e.to_string()).unwrap_or_default();
    vec![
        set.to_string(),
        v.id.to_string(),
        format!("{:?}", v.status),
        opt(v.margin),
        side(&v.lhs),
        side(&v.rhs),
        v.notes.join("; "),
    ]
}

const VERDICT_HEADER: [&str; 7] = ["set", "id", "status", "margin", "lhs", "rhs", "notes"];

fn report_rows(w: &mut csv::Writer<Vec<u8>>, r: &ConditionReport) -> Result<(), ReportError> {
    let set = r.set.name();
    for v in &r.verdicts {
        w.write_record(verdict_row(set, v))?;
    }
    w.write_record([set, "aggregate", &format!("{:?}", r.aggregate), "", "", "", ""])?;
    Ok(())
}

fn csv_text(p: Payload<'_>) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match p {
        Payload::Validation(r) => {
            w.write_record(["kind", "subject", "message"])?;
            for v in &r.violations {
                w.write_record([v.kind.to_string(), v.subject.clone(), v.message.clone()])?;
            }
        }
        Payload::Decision(d) => {
            w.write_record(VERDICT_HEADER)?;
            for r in d.reports() {
                report_rows(&mut w, r)?;
            }
        }
        Payload::Conditions(r) => {
            w.write_record(VERDICT_HEADER)?;
            report_rows(&mut w, r)?;
        }
        Payload::Optimize(o) => {
            w.write_record(["objective", "cost", "capital", "feasible", "B_b", "B_s", "B_i", "B_n", "state", "iterations"])?;
            let d = &o.decision;
            w.write_record([
                num(o.objective),
                num(o.cost),
                num(o.capital),
                o.feasible.to_string(),
                num(d.b_b),
                num(d.b_s),
                num(d.b_i),
                num(d.b_n),
                d.state.to_string(),
                o.iterations.to_string(),
            ])?;
        }
        Payload::Frontier(points) => {
            w.write_record(FRONTIER_HEADER)?;
            for p in points {
                let d = &p.decision;
                w.write_record([num(p.cost), num(p.capital), num(d.b_b), num(d.b_s), num(d.b_i), num(d.b_n), d.state.to_string()])?;
            }
        }
        Payload::Sweep(s) => {
            w.write_record(["id", "frequency", "indeterminate_rate"])?;
            for r in &s.conditions {
                w.write_record([r.id.to_string(), num(r.frequency), num(r.indeterminate_rate)])?;
            }
        }
        Payload::Sensitivity(r) => {
            w.write_record([
                "condition",
                "parameter",
                "base_value",
                "status",
                "margin",
                "margin_minus",
                "margin_plus",
                "elasticity",
                "delta_to_flip",
            ])?;
            w.write_record([
                r.condition.to_string(),
                r.parameter.to_string(),
                num(r.base_value),
                format!("{:?}", r.status),
                num(r.margin),
                opt(r.margin_minus),
                opt(r.margin_plus),
                opt(r.elasticity),
                opt(r.delta_to_flip),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io { path: "<buffer>".into(), source: e.into_error() })?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8 from utf-8 input"))
}

/// Render `payload` for `command` in the requested format.
pub fn render(command: &str, payload: Payload<'_>, config: &RunConfig, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Csv => csv_text(payload),
        Format::Json => match payload {
            Payload::Validation(r) => json(command, config, r),
            Payload::Decision(r) => json(command, config, r),
            Payload::Conditions(r) => json(command, config, r),
            Payload::Optimize(r) => json(command, config, r),
            Payload::Frontier(r) => json(command, config, r),
            Payload::Sweep(r) => json(command, config, r),
            Payload::Sensitivity(r) => json(command, config, r),
        },
    }
}

/// Write rendered text to `out`, or standard output when `None`.
pub fn write_report(text: &str, out: Option<&Path>) -> Result<(), ReportError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| ReportError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| ReportError::Io { path: "<stdout>".into(), source })
        }
    }
}
