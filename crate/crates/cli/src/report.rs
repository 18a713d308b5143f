//! Text serializations of audit reports, solver reports and bundle
//! manifests.

use std::fmt::Write as _;

use warpgeom_core::audit::{AuditReport, CheckResult};
use warpgeom_core::solver::SolveReport;
use warpgeom_core::GeometryBundle;

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn floats(items: &[f64]) -> String {
    items.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

fn write_block(out: &mut String, kind: &str, c: &CheckResult) {
    writeln!(out, "[{kind}]").unwrap();
    writeln!(out, "name={}", c.name).unwrap();
    writeln!(out, "holds={}", c.holds).unwrap();
    writeln!(out, "margin={:.16e}", c.margin).unwrap();
    writeln!(out, "tolerance={:.16e}", c.tolerance).unwrap();
    writeln!(out, "worst_point={}", join(&c.worst_point)).unwrap();
    out.push('\n');
}

/// One block per check followed by the `VERDICT` line.
pub fn format_audit(report: &AuditReport, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        writeln!(out, "# {h}").unwrap();
    }
    writeln!(out, "theorem={}\n", report.theorem_id).unwrap();
    for c in &report.hypothesis_results {
        write_block(&mut out, "hypothesis", c);
    }
    for c in &report.inequality_results {
        write_block(&mut out, "inequality", c);
    }
    for c in &report.advisory_results {
        write_block(&mut out, "advisory", c);
    }
    for note in &report.conclusion_notes {
        writeln!(out, "note={note}").unwrap();
    }
    writeln!(out, "VERDICT {} {}", report.theorem_id, report.verdict()).unwrap();
    out
}

/// `(theorem, verdict)` pairs from the `VERDICT` lines of a report.
pub fn parse_verdicts(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            match (it.next(), it.next(), it.next(), it.next()) {
                (Some("VERDICT"), Some(t), Some(v), None) => Some((t.to_string(), v.to_string())),
                _ => None,
            }
        })
        .collect()
}

pub fn format_solver_report(h_target: f64, report: &SolveReport, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        writeln!(out, "# {h}").unwrap();
    }
    writeln!(out, "h_target={h_target:?}").unwrap();
    writeln!(out, "iterations={}", report.iterations).unwrap();
    writeln!(out, "final_residual={:.16e}", report.final_residual).unwrap();
    writeln!(out, "residual_history={}", floats(&report.residual_history)).unwrap();
    writeln!(out, "damping_history={}", floats(&report.damping_history)).unwrap();
    out
}

/// Key/value pairs of a `key=value` text, skipping comments.
pub fn parse_key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())))
        .collect()
}

pub fn format_manifest(id: &str, bundle: &GeometryBundle, header: Option<&str>) -> String {
    let grid = bundle.grid();
    let mut out = String::new();
    if let Some(h) = header {
        writeln!(out, "# {h}").unwrap();
    }
    writeln!(out, "surface_id={id}").unwrap();
    writeln!(out, "epsilon={}", bundle.model.epsilon_sign()).unwrap();
    writeln!(out, "warp={}", bundle.model.warp().kind()).unwrap();
    writeln!(out, "fiber_dim={}", bundle.n()).unwrap();
    writeln!(out, "orientation={}", bundle.orientation.name()).unwrap();
    writeln!(out, "extents={}", join(grid.extents())).unwrap();
    writeln!(out, "spacing={}", grid.spacing().iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(",")).unwrap();
    writeln!(out, "boundary={}", grid.boundary().code()).unwrap();
    out
}
