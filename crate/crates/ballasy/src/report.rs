//! CSV rows and JSON summaries.

use std::io::Write;

use ballasy_core::spaces::MultiplierReport;
use ballasy_core::verifier::{SweepReport, Verdict};
use serde_json::{json, Value};

/// First line of every CSV report.
pub const CSV_SCHEMA: &str = "# schema=1";
pub const CSV_COLUMNS: [&str; 9] = ["m", "radius", "dir_index", "coupling", "lhs", "lhs_err", "rhs", "ratio", "case_id"];

pub fn write_csv(report: &SweepReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.write_record([
            r.m.to_string(),
            r.radius.to_string(),
            r.dir_index.to_string(),
            r.coupling.clone(),
            r.lhs.to_string(),
            r.lhs_err.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
            r.case_id.clone(),
        ])?;
    }
    w.flush()
}

/// Non-finite values become `null`.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn summary_json(report: &SweepReport, verdict: &Verdict) -> Value {
    json!({
        "case": report.case.label(),
        "window": num(report.window),
        "slope": num(report.slope),
        "predicted": num(report.predicted),
        "verdict": if verdict.pass { "pass" } else { "fail" },
        "excluded_rows": report.excluded_rows,
    })
}

pub fn multiplier_json(psi: &str, report: &MultiplierReport) -> Value {
    let criteria: serde_json::Map<String, Value> = report
        .criteria
        .iter()
        .map(|c| (c.id.to_string(), json!({ "value": num(c.value), "diverges": c.diverges })))
        .collect();
    json!({
        "psi": psi,
        "n": report.n,
        "grid_points": report.grid_points,
        "max_shell": report.max_shell,
        "criteria": criteria,
    })
}

/// One line for the terminal.
pub fn verdict_line(report: &SweepReport, verdict: &Verdict) -> String {
    let state = if verdict.pass { "pass" } else { "fail" };
    if verdict.one_sided {
        return format!("{} {state}: ratio_min {:.4} (lower bound only)", report.case.label(), report.ratio_min);
    }
    format!(
        "{} {state}: window {:.4}, slope {:.4}, predicted {:.4}, tail windows {:.4}/{:.4}",
        report.case.label(),
        verdict.window,
        verdict.slope,
        verdict.predicted,
        verdict.tail4_window,
        verdict.tail8_window
    )
}
