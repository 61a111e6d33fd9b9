//! Penalty-mode batch grading over offline measure exports.

use std::fmt::Write as _;
use std::path::Path;

use debtjudge_core::{apply_penalty, evaluate_gate, GateStatus, MeasureExport, PolicyConfig, PolicyError};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeRow {
    pub project: String,
    pub status: GateStatus,
    pub code_grade: f64,
    pub penalty_fraction: f64,
    pub grade: f64,
    /// Conditions that reached the overall status.
    pub breaches: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Distribution {
    pub passed: usize,
    pub warning: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeReport {
    pub rows: Vec<GradeRow>,
    pub distribution: Distribution,
}

/// A gate file must declare its own conditions; the built-in placeholder
/// gate is never used here silently.
fn load_gate_file(path: &Path) -> Result<PolicyConfig, CliError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("gate file {display}: {e}")))?;
    let table: toml::Table =
        toml::from_str(&text).map_err(|source| PolicyError::Parse { path: display.clone(), source })?;
    if !table.get("condition").is_some_and(|c| c.as_array().is_some_and(|a| !a.is_empty())) {
        return Err(CliError::Validation(format!("gate file {display} defines no [[condition]]")));
    }
    let cfg = PolicyConfig::parse(&text).map_err(|source| PolicyError::Parse { path: display, source })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn grade_penalty(measures_dir: &Path, gate_file: &Path, default_code_grade: f64) -> Result<GradeReport, CliError> {
    let policy = load_gate_file(gate_file)?;
    if !(default_code_grade.is_finite() && default_code_grade >= 0.0) {
        return Err(CliError::Validation(format!("code grade {default_code_grade} must be non-negative")));
    }
    let entries = std::fs::read_dir(measures_dir)
        .map_err(|e| CliError::Io(format!("measures directory {}: {e}", measures_dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            files.push(path);
        }
    }
    files.sort();

    let mut rows = Vec::with_capacity(files.len());
    let mut distribution = Distribution::default();
    for path in files {
        let export = MeasureExport::load(&path)?;
        let report = evaluate_gate(&export.snapshot, &policy.gate).map_err(|e| CliError::Validation(e.to_string()))?;
        let code_grade = export.code_grade.unwrap_or(default_code_grade);
        match report.status {
            GateStatus::Passed => distribution.passed += 1,
            GateStatus::Warning => distribution.warning += 1,
            GateStatus::Failed => distribution.failed += 1,
        }
        rows.push(GradeRow {
            project: export.snapshot.project_key.clone(),
            status: report.status,
            code_grade,
            penalty_fraction: policy.penalty.fraction(report.status),
            grade: apply_penalty(code_grade, report.status, &policy.penalty),
            breaches: report
                .verdicts
                .iter()
                .filter(|v| v.level != GateStatus::Passed && v.level == report.status)
                .map(|v| format!("{}={}", v.metric, v.value))
                .collect(),
        });
    }
    Ok(GradeReport { rows, distribution })
}

impl GradeReport {
    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.project.len()).max().unwrap_or(0).max("project".len());
        let mut out = format!("{:<width$}  {:<8}  {:>10}  {:>7}  {:>6}  breaches\n", "project", "status", "code grade", "penalty", "grade");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:<8}  {:>10.2}  {:>6.0}%  {:>6.2}  {}",
                r.project,
                r.status.to_string(),
                r.code_grade,
                r.penalty_fraction * 100.0,
                r.grade,
                r.breaches.join(" ")
            );
        }
        let d = self.distribution;
        let _ = writeln!(out, "distribution: failed {}, warning {}, passed {}", d.failed, d.warning, d.passed);
        out
    }
}
