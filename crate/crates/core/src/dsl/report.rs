//! Human-readable and machine reports for replays and computations.
//!
//! The machine format is JSON with a `schema_version` field. Keys appear in
//! a fixed order and maps are sorted, so identical inputs give identical
//! bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::rewrite::ValidationReport;
use crate::weyl::{nonzero, CohomologyReport, ComparisonReport, Dims, LesNode, Snapshot};

use super::render::render_expr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Machine,
}

/// Anything `render_report` can print.
#[derive(Clone, Copy, Debug)]
pub enum Report<'a> {
    Validation { goal: &'a str, report: &'a ValidationReport },
    Cohomology(&'a CohomologyReport),
    Comparison(&'a ComparisonReport),
}

#[derive(Serialize)]
struct MachineApplication {
    direction: String,
    path: String,
}

#[derive(Serialize)]
struct MachineStep {
    index: usize,
    rule: String,
    applications: Vec<MachineApplication>,
    shift: i64,
    term: String,
}

#[derive(Serialize)]
struct MachineValidation<'a> {
    schema_version: u32,
    kind: &'static str,
    goal: &'a str,
    valid: bool,
    failing_step: Option<usize>,
    reason: Option<&'a str>,
    steps: Vec<MachineStep>,
    shift_ledger: &'a [i64],
    net_shift: i64,
    rules_used: &'a BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct MachineCohomology<'a> {
    schema_version: u32,
    kind: &'static str,
    #[serde(flatten)]
    report: &'a CohomologyReport,
}

#[derive(Serialize)]
struct MachineComparison<'a> {
    schema_version: u32,
    kind: &'static str,
    #[serde(flatten)]
    report: &'a ComparisonReport,
}

fn machine_validation<'a>(goal: &'a str, r: &'a ValidationReport) -> MachineValidation<'a> {
    MachineValidation {
        schema_version: SCHEMA_VERSION,
        kind: "certificate",
        goal,
        valid: r.valid,
        failing_step: r.failing_step,
        reason: r.reason.as_deref(),
        steps: r
            .steps
            .iter()
            .map(|s| MachineStep {
                index: s.index,
                rule: s.label.clone(),
                applications: s
                    .applications
                    .iter()
                    .map(|(d, p)| MachineApplication { direction: d.to_string(), path: p.to_string() })
                    .collect(),
                shift: s.delta,
                term: render_expr(&s.term),
            })
            .collect(),
        shift_ledger: &r.shift_ledger,
        net_shift: r.net_shift(),
        rules_used: &r.rules_used,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Renders a report in the requested format.
pub fn render_report(report: Report<'_>, format: ReportFormat) -> String {
    match (report, format) {
        (Report::Validation { goal, report }, ReportFormat::Machine) => to_json(&machine_validation(goal, report)),
        (Report::Cohomology(r), ReportFormat::Machine) => {
            to_json(&MachineCohomology { schema_version: SCHEMA_VERSION, kind: "cohomology", report: r })
        }
        (Report::Comparison(r), ReportFormat::Machine) => {
            to_json(&MachineComparison { schema_version: SCHEMA_VERSION, kind: "comparison", report: r })
        }
        (Report::Validation { goal, report }, ReportFormat::Text) => text_validation(goal, report),
        (Report::Cohomology(r), ReportFormat::Text) => text_cohomology("", r),
        (Report::Comparison(r), ReportFormat::Text) => text_comparison(r),
    }
}

#[derive(Serialize)]
struct MachineBatch<'a> {
    schema_version: u32,
    kind: &'static str,
    all_valid: bool,
    certificates: Vec<MachineValidation<'a>>,
}

/// Several replays in one document; the text form separates them with
/// blank lines and ends with a summary line.
pub fn render_batch(items: &[(&str, &ValidationReport)], format: ReportFormat) -> String {
    let all_valid = items.iter().all(|(_, r)| r.valid);
    match format {
        ReportFormat::Machine => to_json(&MachineBatch {
            schema_version: SCHEMA_VERSION,
            kind: "batch",
            all_valid,
            certificates: items.iter().map(|(g, r)| machine_validation(g, r)).collect(),
        }),
        ReportFormat::Text => {
            let mut out = String::new();
            for (g, r) in items {
                out.push_str(&text_validation(g, r));
                out.push('\n');
            }
            let ok = items.iter().filter(|(_, r)| r.valid).count();
            let _ = writeln!(out, "{ok}/{} valid", items.len());
            out
        }
    }
}

fn text_validation(goal: &str, r: &ValidationReport) -> String {
    let mut out = String::new();
    if r.valid {
        let _ = writeln!(out, "{goal}: valid ({} steps, net shift {})", r.steps.len(), r.net_shift());
    } else {
        match r.failing_step {
            Some(i) => {
                let _ = writeln!(out, "{goal}: INVALID at step {i}: {}", r.reason.as_deref().unwrap_or(""));
            }
            None => {
                let _ = writeln!(out, "{goal}: INVALID: {}", r.reason.as_deref().unwrap_or(""));
            }
        }
    }
    for s in &r.steps {
        let apps: Vec<String> = s.applications.iter().map(|(d, p)| format!("{d} {p}")).collect();
        let _ = writeln!(out, "  {:>2}. {:<16} {:<22} [{:+}]  {}", s.index, s.label, apps.join(", "), s.delta, render_expr(&s.term));
    }
    let rules: Vec<String> = r.rules_used.iter().map(|(k, v)| format!("{k} x{v}")).collect();
    let _ = writeln!(out, "  rules: {}", if rules.is_empty() { "none".to_string() } else { rules.join(", ") });
    let _ = writeln!(out, "  shift ledger: {:?}", r.shift_ledger);
    out
}

fn dims_text(d: &Dims) -> String {
    let nz = nonzero(d);
    if nz.is_empty() {
        return "all zero".into();
    }
    let parts: Vec<String> = nz.iter().map(|(k, v)| format!("H^{k} = {v}")).collect();
    format!("{} (others 0)", parts.join(", "))
}

fn snapshot_text(s: &Snapshot) -> String {
    let dims: Vec<String> = s.dims.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    match s.pole_order {
        Some(m) => format!("m={m} D={}: {{{}}}", s.degree, dims.join(", ")),
        None => format!("D={}: {{{}}}", s.degree, dims.join(", ")),
    }
}

fn text_cohomology(indent: &str, r: &CohomologyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{indent}dims: {}", dims_text(&r.dims));
    let _ = writeln!(
        out,
        "{indent}stabilized: {} (window {})",
        if r.stabilized { "yes" } else { "no" },
        r.window
    );
    for s in &r.truncation_trace {
        let _ = writeln!(out, "{indent}  {}", snapshot_text(s));
    }
    out
}

fn les_text(seq: &[LesNode]) -> String {
    let parts: Vec<String> = seq.iter().filter(|n| n.dim > 0).map(|n| format!("{}={}", n.label, n.dim)).collect();
    parts.join(" ")
}

fn text_comparison(r: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "f = [{}] on A^{}, F = {}", r.f.join(", "), r.n, r.dwork_function);
    let _ = writeln!(out, "twisted side (A^{}):", r.n + r.r);
    out.push_str(&text_cohomology("  ", &r.twisted));
    let _ = writeln!(out, "supports side: {}", dims_text(&r.supports.dims));
    let _ = writeln!(out, "  long exact sequence: {}", les_text(&r.supports.sequence));
    let _ = writeln!(out, "  complement:");
    out.push_str(&text_cohomology("    ", &r.supports.complement));
    let verdict = if !r.stabilized {
        "INCONCLUSIVE (truncation did not stabilize)"
    } else if r.matched {
        "MATCH"
    } else {
        "MISMATCH"
    };
    let _ = writeln!(out, "result: {verdict}");
    out
}
