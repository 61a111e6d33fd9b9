//! Raw analyzer measures, the derived study variables, contest scores and
//! the tie-break cascade used to rank submissions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("missing metrics: {}", .0.join(", "))]
    MissingMetric(Vec<String>),
    #[error("malformed value for `{key}`: {text:?}")]
    MalformedValue { key: String, text: String },
    #[error("inconsistent snapshot: {0}")]
    Inconsistent(String),
    #[error("project has no code to analyze (ncloc = 0)")]
    EmptyProject,
    #[error("invalid score weights: {0}")]
    InvalidWeights(String),
}

/// The numeric measures consumed from the analyzer, named by their
/// analyzer-native metric keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricField {
    #[serde(rename = "ncloc")]
    Ncloc,
    #[serde(rename = "code_smells")]
    CodeSmells,
    #[serde(rename = "sqale_debt_ratio")]
    SqaleDebtRatio,
    #[serde(rename = "duplicated_lines_density")]
    DuplicatedLinesDensity,
    #[serde(rename = "comment_lines_density", alias = "comment_density")]
    CommentLinesDensity,
    #[serde(rename = "security_remediation_effort")]
    SecurityRemediationEffort,
    #[serde(rename = "reliability_remediation_effort")]
    ReliabilityRemediationEffort,
    #[serde(rename = "cognitive_complexity")]
    CognitiveComplexity,
    #[serde(rename = "complexity", alias = "cyclomatic_complexity")]
    Complexity,
    #[serde(rename = "functions")]
    Functions,
    #[serde(rename = "bugs")]
    Bugs,
    #[serde(rename = "vulnerabilities")]
    Vulnerabilities,
    #[serde(rename = "violations")]
    Violations,
    #[serde(rename = "blocker_violations")]
    BlockerViolations,
    #[serde(rename = "major_violations")]
    MajorViolations,
}

impl MetricField {
    pub const ALL: [MetricField; 15] = [
        MetricField::Ncloc,
        MetricField::CodeSmells,
        MetricField::SqaleDebtRatio,
        MetricField::DuplicatedLinesDensity,
        MetricField::CommentLinesDensity,
        MetricField::SecurityRemediationEffort,
        MetricField::ReliabilityRemediationEffort,
        MetricField::CognitiveComplexity,
        MetricField::Complexity,
        MetricField::Functions,
        MetricField::Bugs,
        MetricField::Vulnerabilities,
        MetricField::Violations,
        MetricField::BlockerViolations,
        MetricField::MajorViolations,
    ];

    /// Analyzer-native metric key.
    pub fn key(self) -> &'static str {
        match self {
            MetricField::Ncloc => "ncloc",
            MetricField::CodeSmells => "code_smells",
            MetricField::SqaleDebtRatio => "sqale_debt_ratio",
            MetricField::DuplicatedLinesDensity => "duplicated_lines_density",
            MetricField::CommentLinesDensity => "comment_lines_density",
            MetricField::SecurityRemediationEffort => "security_remediation_effort",
            MetricField::ReliabilityRemediationEffort => "reliability_remediation_effort",
            MetricField::CognitiveComplexity => "cognitive_complexity",
            MetricField::Complexity => "complexity",
            MetricField::Functions => "functions",
            MetricField::Bugs => "bugs",
            MetricField::Vulnerabilities => "vulnerabilities",
            MetricField::Violations => "violations",
            MetricField::BlockerViolations => "blocker_violations",
            MetricField::MajorViolations => "major_violations",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        MetricField::ALL.into_iter().find(|f| f.key() == key)
    }

    fn is_count(self) -> bool {
        !matches!(
            self,
            MetricField::SqaleDebtRatio
                | MetricField::DuplicatedLinesDensity
                | MetricField::CommentLinesDensity
                | MetricField::SecurityRemediationEffort
                | MetricField::ReliabilityRemediationEffort
        )
    }
}

impl fmt::Display for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// The comma-separated key list sent to the analyzer's measures endpoint.
pub fn metric_keys_param() -> String {
    MetricField::ALL.map(MetricField::key).join(",")
}

/// Identity of one analysis, carried alongside its measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisMeta {
    pub project_key: String,
    pub analysis_id: String,
    pub analysed_at: DateTime<Utc>,
}

/// Raw analyzer measures for one project analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSnapshot {
    pub project_key: String,
    pub analysis_id: String,
    pub analysed_at: DateTime<Utc>,
    pub ncloc: u64,
    pub code_smells: u64,
    pub sqale_debt_ratio: f64,
    pub duplicated_lines_density: f64,
    pub comment_lines_density: f64,
    /// Minutes.
    pub security_remediation_effort: f64,
    /// Minutes.
    pub reliability_remediation_effort: f64,
    pub cognitive_complexity: u64,
    pub cyclomatic_complexity: u64,
    pub functions: u64,
    pub bugs: u64,
    pub vulnerabilities: u64,
    pub violations: u64,
    pub blocker_violations: u64,
    pub major_violations: u64,
}

impl MetricSnapshot {
    /// Value of a field as a real number, for gate evaluation.
    pub fn value(&self, field: MetricField) -> f64 {
        match field {
            MetricField::Ncloc => self.ncloc as f64,
            MetricField::CodeSmells => self.code_smells as f64,
            MetricField::SqaleDebtRatio => self.sqale_debt_ratio,
            MetricField::DuplicatedLinesDensity => self.duplicated_lines_density,
            MetricField::CommentLinesDensity => self.comment_lines_density,
            MetricField::SecurityRemediationEffort => self.security_remediation_effort,
            MetricField::ReliabilityRemediationEffort => self.reliability_remediation_effort,
            MetricField::CognitiveComplexity => self.cognitive_complexity as f64,
            MetricField::Complexity => self.cyclomatic_complexity as f64,
            MetricField::Functions => self.functions as f64,
            MetricField::Bugs => self.bugs as f64,
            MetricField::Vulnerabilities => self.vulnerabilities as f64,
            MetricField::Violations => self.violations as f64,
            MetricField::BlockerViolations => self.blocker_violations as f64,
            MetricField::MajorViolations => self.major_violations as f64,
        }
    }

    /// Checks the structural invariants between fields.
    pub fn validate(&self) -> Result<(), MetricsError> {
        let reals = [
            ("sqale_debt_ratio", self.sqale_debt_ratio, f64::INFINITY),
            ("duplicated_lines_density", self.duplicated_lines_density, 100.0),
            ("comment_lines_density", self.comment_lines_density, 100.0),
            ("security_remediation_effort", self.security_remediation_effort, f64::INFINITY),
            ("reliability_remediation_effort", self.reliability_remediation_effort, f64::INFINITY),
        ];
        for (name, value, max) in reals {
            if !value.is_finite() || value < 0.0 || value > max {
                return Err(MetricsError::Inconsistent(format!("{name} = {value} out of range")));
            }
        }
        if self.blocker_violations.saturating_add(self.major_violations) > self.violations {
            return Err(MetricsError::Inconsistent(format!(
                "blocker ({}) + major ({}) violations exceed total violations ({})",
                self.blocker_violations, self.major_violations, self.violations
            )));
        }
        if self.functions > 0 && self.cyclomatic_complexity < self.functions {
            return Err(MetricsError::Inconsistent(format!(
                "complexity ({}) below function count ({})",
                self.cyclomatic_complexity, self.functions
            )));
        }
        Ok(())
    }
}

enum Parsed {
    Count(u64),
    Real(f64),
}

fn parse_value(field: MetricField, text: &str) -> Result<Parsed, MetricsError> {
    let malformed = || MetricsError::MalformedValue {
        key: field.key().to_string(),
        text: text.to_string(),
    };
    let trimmed = text.trim();
    if field.is_count() {
        // Counts occasionally arrive as "12.0"; accept integral reals.
        if let Ok(v) = trimmed.parse::<u64>() {
            return Ok(Parsed::Count(v));
        }
        let v = parse_real(trimmed).ok_or_else(malformed)?;
        if v.fract() != 0.0 || v > u64::MAX as f64 {
            return Err(malformed());
        }
        Ok(Parsed::Count(v as u64))
    } else {
        parse_real(trimmed).map(Parsed::Real).ok_or_else(malformed)
    }
}

fn parse_real(text: &str) -> Option<f64> {
    // `f64::from_str` also accepts "inf" and "NaN", which are never valid measures.
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E')) {
        return None;
    }
    let v: f64 = text.parse().ok()?;
    (v.is_finite() && v >= 0.0).then_some(v)
}

/// Builds a validated snapshot from analyzer `(metric key, value)` pairs.
///
/// Unknown keys are ignored. Numbers use a dot decimal separator regardless
/// of locale.
pub fn parse_measures<K, V>(raw: &[(K, V)], meta: AnalysisMeta) -> Result<MetricSnapshot, MetricsError>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let by_key: HashMap<&str, &str> = raw.iter().map(|(k, v)| (k.as_ref(), v.as_ref())).collect();
    let missing: Vec<String> = MetricField::ALL
        .iter()
        .filter(|f| !by_key.contains_key(f.key()))
        .map(|f| f.key().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(MetricsError::MissingMetric(missing));
    }

    let count = |f: MetricField| -> Result<u64, MetricsError> {
        match parse_value(f, by_key[f.key()])? {
            Parsed::Count(v) => Ok(v),
            Parsed::Real(_) => unreachable!("count field parsed as real"),
        }
    };
    let real = |f: MetricField| -> Result<f64, MetricsError> {
        match parse_value(f, by_key[f.key()])? {
            Parsed::Real(v) => Ok(v),
            Parsed::Count(v) => Ok(v as f64),
        }
    };

    let snapshot = MetricSnapshot {
        project_key: meta.project_key,
        analysis_id: meta.analysis_id,
        analysed_at: meta.analysed_at,
        ncloc: count(MetricField::Ncloc)?,
        code_smells: count(MetricField::CodeSmells)?,
        sqale_debt_ratio: real(MetricField::SqaleDebtRatio)?,
        duplicated_lines_density: real(MetricField::DuplicatedLinesDensity)?,
        comment_lines_density: real(MetricField::CommentLinesDensity)?,
        security_remediation_effort: real(MetricField::SecurityRemediationEffort)?,
        reliability_remediation_effort: real(MetricField::ReliabilityRemediationEffort)?,
        cognitive_complexity: count(MetricField::CognitiveComplexity)?,
        cyclomatic_complexity: count(MetricField::Complexity)?,
        functions: count(MetricField::Functions)?,
        bugs: count(MetricField::Bugs)?,
        vulnerabilities: count(MetricField::Vulnerabilities)?,
        violations: count(MetricField::Violations)?,
        blocker_violations: count(MetricField::BlockerViolations)?,
        major_violations: count(MetricField::MajorViolations)?,
    };
    snapshot.validate()?;
    Ok(snapshot)
}

/// The eight dependent variables of the cohort study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedMetrics {
    pub sqale_debt_ratio: f64,
    pub duplicated_lines_density: f64,
    pub comment_density: f64,
    pub smell_density: f64,
    /// Security remediation minutes per line.
    pub security_rate: f64,
    /// Reliability remediation minutes per line.
    pub reliability_rate: f64,
    pub cognitive_complexity_rate: f64,
    pub cyclomatic_complexity_rate: f64,
}

pub fn compute_derived(s: &MetricSnapshot) -> Result<DerivedMetrics, MetricsError> {
    if s.ncloc == 0 {
        return Err(MetricsError::EmptyProject);
    }
    let ncloc = s.ncloc as f64;
    Ok(DerivedMetrics {
        sqale_debt_ratio: s.sqale_debt_ratio,
        duplicated_lines_density: s.duplicated_lines_density,
        comment_density: s.comment_lines_density,
        smell_density: s.code_smells as f64 / ncloc,
        security_rate: s.security_remediation_effort / ncloc,
        reliability_rate: s.reliability_remediation_effort / ncloc,
        cognitive_complexity_rate: s.cognitive_complexity as f64 / ncloc,
        cyclomatic_complexity_rate: s.cyclomatic_complexity.saturating_sub(s.functions) as f64 / ncloc,
    })
}

/// Multipliers for the four score addends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreWeights {
    pub tdr: f64,
    pub dcd: f64,
    pub pb_re: f64,
    pub sv_re: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self { tdr: 1.0, dcd: 1.0, pb_re: 1.0, sv_re: 1.0 }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<(), MetricsError> {
        for (name, w) in [("tdr", self.tdr), ("dcd", self.dcd), ("pb_re", self.pb_re), ("sv_re", self.sv_re)] {
            if !w.is_finite() || w < 0.0 {
                return Err(MetricsError::InvalidWeights(format!("{name} = {w}")));
            }
        }
        Ok(())
    }
}

/// The weighted addends of a score, kept for display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub tdr: f64,
    pub dcd: f64,
    pub pb_re: f64,
    pub sv_re: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub components: ScoreComponents,
}

/// Contest score: debt ratio plus duplication density plus the reliability
/// and security remediation rates. Lower is better.
pub fn compute_score(d: &DerivedMetrics, w: &ScoreWeights) -> Score {
    let components = ScoreComponents {
        tdr: w.tdr * d.sqale_debt_ratio,
        dcd: w.dcd * d.duplicated_lines_density,
        pb_re: w.pb_re * d.reliability_rate,
        sv_re: w.sv_re * d.security_rate,
    };
    Score {
        value: components.tdr + components.dcd + components.pb_re + components.sv_re,
        components,
    }
}

/// Criteria that break ties between equal scores, compared in field order.
///
/// Every field is "lower wins" except `comment_density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieBreakKey {
    pub technical_debt_ratio: f64,
    pub smell_severity: f64,
    pub duplicated_lines_density: f64,
    pub bugs: u64,
    pub vulnerabilities: u64,
    pub cyclomatic_complexity: u64,
    pub cognitive_complexity: u64,
    pub comment_density: f64,
    pub submitted_at: DateTime<Utc>,
}

impl TieBreakKey {
    /// Position of the first criterion that differs, if any (0-based).
    pub fn deciding_criterion(&self, other: &Self) -> Option<usize> {
        self.criteria_cmp(other).into_iter().position(|o| o != Ordering::Equal)
    }

    fn criteria_cmp(&self, other: &Self) -> [Ordering; 9] {
        [
            self.technical_debt_ratio.total_cmp(&other.technical_debt_ratio),
            self.smell_severity.total_cmp(&other.smell_severity),
            self.duplicated_lines_density.total_cmp(&other.duplicated_lines_density),
            self.bugs.cmp(&other.bugs),
            self.vulnerabilities.cmp(&other.vulnerabilities),
            self.cyclomatic_complexity.cmp(&other.cyclomatic_complexity),
            self.cognitive_complexity.cmp(&other.cognitive_complexity),
            other.comment_density.total_cmp(&self.comment_density),
            self.submitted_at.cmp(&other.submitted_at),
        ]
    }
}

impl Eq for TieBreakKey {}

impl PartialOrd for TieBreakKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TieBreakKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.criteria_cmp(other)
            .into_iter()
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

pub fn smell_severity(s: &MetricSnapshot) -> f64 {
    if s.violations == 0 {
        0.0
    } else {
        (s.blocker_violations + s.major_violations) as f64 / s.violations as f64
    }
}

pub fn tiebreak_key(s: &MetricSnapshot, submitted_at: DateTime<Utc>) -> TieBreakKey {
    TieBreakKey {
        technical_debt_ratio: s.sqale_debt_ratio,
        smell_severity: smell_severity(s),
        duplicated_lines_density: s.duplicated_lines_density,
        bugs: s.bugs,
        vulnerabilities: s.vulnerabilities,
        cyclomatic_complexity: s.cyclomatic_complexity,
        cognitive_complexity: s.cognitive_complexity,
        comment_density: s.comment_lines_density,
        submitted_at,
    }
}

/// Ranking order: `Less` means `a` places ahead of `b`.
///
/// Scores are compared at full precision; ties fall through to the
/// tie-break key. Only identical keys (including the timestamp) compare
/// `Equal`.
pub fn compare_entries(a: (&Score, &TieBreakKey), b: (&Score, &TieBreakKey)) -> Ordering {
    a.0.value.total_cmp(&b.0.value).then_with(|| a.1.cmp(b.1))
}
