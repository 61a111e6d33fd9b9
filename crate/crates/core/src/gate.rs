//! Three-state quality gates over snapshot metrics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{MetricField, MetricSnapshot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    /// Breached when the value is greater than the threshold.
    #[serde(alias = "gt", alias = "greater-than", alias = "greater_than")]
    Gt,
    /// Breached when the value is less than the threshold.
    #[serde(alias = "lt", alias = "less-than", alias = "less_than")]
    Lt,
}

impl Comparator {
    fn breaches(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateCondition {
    pub metric: MetricField,
    pub comparator: Comparator,
    #[serde(default, alias = "warning_threshold")]
    pub warning: Option<f64>,
    #[serde(default, alias = "error_threshold")]
    pub error: Option<f64>,
}

impl GateCondition {
    pub fn new(metric: MetricField, comparator: Comparator, warning: Option<f64>, error: Option<f64>) -> Self {
        Self { metric, comparator, warning, error }
    }

    pub fn validate(&self) -> Result<(), GateError> {
        let bad = |msg: &str| Err(GateError::InvalidGate(format!("{}: {msg}", self.metric)));
        if self.warning.is_none() && self.error.is_none() {
            return bad("no threshold set");
        }
        if self.warning.is_some_and(|t| !t.is_finite()) || self.error.is_some_and(|t| !t.is_finite()) {
            return bad("non-finite threshold");
        }
        if let (Some(w), Some(e)) = (self.warning, self.error) {
            let ordered = match self.comparator {
                Comparator::Gt => e >= w,
                Comparator::Lt => e <= w,
            };
            if !ordered {
                return bad("error threshold is looser than warning threshold");
            }
        }
        Ok(())
    }

    fn verdict(&self, s: &MetricSnapshot) -> ConditionVerdict {
        let value = s.value(self.metric);
        let level = if self.error.is_some_and(|t| self.comparator.breaches(value, t)) {
            GateStatus::Failed
        } else if self.warning.is_some_and(|t| self.comparator.breaches(value, t)) {
            GateStatus::Warning
        } else {
            GateStatus::Passed
        };
        ConditionVerdict { metric: self.metric, value, level }
    }
}

/// Ordered from best to worst, so `max` over verdicts gives the overall status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateStatus {
    Passed,
    Warning,
    Failed,
}

impl GateStatus {
    /// Maps the analyzer's `OK` / `WARN` / `ERROR` labels.
    pub fn from_analyzer(label: &str) -> Option<Self> {
        match label {
            "OK" => Some(GateStatus::Passed),
            "WARN" => Some(GateStatus::Warning),
            "ERROR" => Some(GateStatus::Failed),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateStatus::Passed => "Passed",
            GateStatus::Warning => "Warning",
            GateStatus::Failed => "Failed",
        }
    }
}

impl fmt::Display for GateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub metric: MetricField,
    pub value: f64,
    pub level: GateStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub status: GateStatus,
    pub verdicts: Vec<ConditionVerdict>,
}

pub fn validate_gate(gate: &[GateCondition]) -> Result<(), GateError> {
    if gate.is_empty() {
        return Err(GateError::InvalidGate("gate has no conditions".into()));
    }
    gate.iter().try_for_each(GateCondition::validate)
}

pub fn evaluate_gate(s: &MetricSnapshot, gate: &[GateCondition]) -> Result<GateReport, GateError> {
    validate_gate(gate)?;
    let verdicts: Vec<_> = gate.iter().map(|c| c.verdict(s)).collect();
    let status = verdicts.iter().map(|v| v.level).max().unwrap_or(GateStatus::Passed);
    Ok(GateReport { status, verdicts })
}

/// Placeholder gate shipped when no gate file is configured.
pub fn default_gate() -> Vec<GateCondition> {
    vec![
        GateCondition::new(MetricField::SqaleDebtRatio, Comparator::Gt, Some(3.0), Some(5.0)),
        GateCondition::new(MetricField::DuplicatedLinesDensity, Comparator::Gt, Some(5.0), Some(10.0)),
        GateCondition::new(MetricField::Bugs, Comparator::Gt, None, Some(0.0)),
        GateCondition::new(MetricField::Vulnerabilities, Comparator::Gt, None, Some(0.0)),
    ]
}
