//! Cohort dataset: one row per project with its strategy label and the eight
//! study variables.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::DerivedMetrics;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("line {line}: unknown strategy {value:?} (expected penalising or rewarding)")]
    BadFactor { line: u64, value: String },
    #[error("line {line}: bad number in column {column}: {text:?}")]
    BadNumber { line: u64, column: String, text: String },
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Penalising,
    Rewarding,
}

impl Strategy {
    pub const BOTH: [Strategy; 2] = [Strategy::Penalising, Strategy::Rewarding];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Penalising => "penalising",
            Strategy::Rewarding => "rewarding",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "penalising" => Some(Strategy::Penalising),
            "rewarding" => Some(Strategy::Rewarding),
            _ => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The study variables, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyMetric {
    ReliabilityRate,
    SecurityRate,
    CommentDensity,
    SqaleDebtRatio,
    SmellsDensity,
    DuplicatedLinesDensity,
    CyclomaticComplexityRate,
    CognitiveComplexityRate,
}

impl StudyMetric {
    pub const ALL: [StudyMetric; 8] = [
        StudyMetric::ReliabilityRate,
        StudyMetric::SecurityRate,
        StudyMetric::CommentDensity,
        StudyMetric::SqaleDebtRatio,
        StudyMetric::SmellsDensity,
        StudyMetric::DuplicatedLinesDensity,
        StudyMetric::CyclomaticComplexityRate,
        StudyMetric::CognitiveComplexityRate,
    ];

    pub fn column(self) -> &'static str {
        match self {
            StudyMetric::ReliabilityRate => "reliability_rate",
            StudyMetric::SecurityRate => "security_rate",
            StudyMetric::CommentDensity => "comment_density",
            StudyMetric::SqaleDebtRatio => "sqale_debt_ratio",
            StudyMetric::SmellsDensity => "smells_density",
            StudyMetric::DuplicatedLinesDensity => "duplicated_lines_density",
            StudyMetric::CyclomaticComplexityRate => "cyclomatic_complexity_rate",
            StudyMetric::CognitiveComplexityRate => "cognitive_complexity_rate",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StudyMetric::ReliabilityRate => "Reliability rate",
            StudyMetric::SecurityRate => "Security rate",
            StudyMetric::CommentDensity => "Comment density",
            StudyMetric::SqaleDebtRatio => "SQALE Debt ratio",
            StudyMetric::SmellsDensity => "Smells density",
            StudyMetric::DuplicatedLinesDensity => "Duplicated lines density",
            StudyMetric::CyclomaticComplexityRate => "Cyclomatic complexity rate",
            StudyMetric::CognitiveComplexityRate => "Cognitive complexity rate",
        }
    }

    /// Whether larger values are better (only comment density).
    pub fn higher_is_better(self) -> bool {
        self == StudyMetric::CommentDensity
    }

    fn index(self) -> usize {
        StudyMetric::ALL.iter().position(|m| *m == self).expect("listed")
    }

    fn of(self, d: &DerivedMetrics) -> f64 {
        match self {
            StudyMetric::ReliabilityRate => d.reliability_rate,
            StudyMetric::SecurityRate => d.security_rate,
            StudyMetric::CommentDensity => d.comment_density,
            StudyMetric::SqaleDebtRatio => d.sqale_debt_ratio,
            StudyMetric::SmellsDensity => d.smell_density,
            StudyMetric::DuplicatedLinesDensity => d.duplicated_lines_density,
            StudyMetric::CyclomaticComplexityRate => d.cyclomatic_complexity_rate,
            StudyMetric::CognitiveComplexityRate => d.cognitive_complexity_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortRow {
    pub project: String,
    pub strategy: Strategy,
    /// Indexed in `StudyMetric::ALL` order.
    pub values: [f64; 8],
}

impl CohortRow {
    pub fn from_derived(project: impl Into<String>, strategy: Strategy, d: &DerivedMetrics) -> Self {
        Self { project: project.into(), strategy, values: StudyMetric::ALL.map(|m| m.of(d)) }
    }

    pub fn value(&self, metric: StudyMetric) -> f64 {
        self.values[metric.index()]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CohortDataset {
    pub rows: Vec<CohortRow>,
}

impl CohortDataset {
    pub fn new(rows: Vec<CohortRow>) -> Self {
        Self { rows }
    }

    pub fn group(&self, strategy: Strategy, metric: StudyMetric) -> Vec<f64> {
        self.rows.iter().filter(|r| r.strategy == strategy).map(|r| r.value(metric)).collect()
    }

    /// `(penalising, rewarding)` row counts.
    pub fn sizes(&self) -> (usize, usize) {
        let p = self.rows.iter().filter(|r| r.strategy == Strategy::Penalising).count();
        (p, self.rows.len() - p)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Writes the dataset with the same header `load_dataset` expects.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["project", "strategy"];
        header.extend(StudyMetric::ALL.map(StudyMetric::column));
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.project.clone(), r.strategy.to_string()];
            rec.extend(r.values.iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Reads a comma-separated dataset with header
/// `project,strategy,<the eight metric columns>` (any column order; extra
/// columns ignored).
pub fn load_dataset(reader: impl Read) -> Result<CohortDataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| DatasetError::Csv(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::Schema(format!("missing column {name:?}")))
    };
    let project_col = col("project")?;
    let strategy_col = col("strategy")?;
    let metric_cols: Vec<usize> = StudyMetric::ALL.iter().map(|m| col(m.column())).collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| DatasetError::Csv(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let project = record.get(project_col).unwrap_or_default().to_string();
        let raw_strategy = record.get(strategy_col).unwrap_or_default();
        let strategy = Strategy::parse(raw_strategy)
            .ok_or_else(|| DatasetError::BadFactor { line, value: raw_strategy.to_string() })?;
        let mut values = [0.0; 8];
        for (slot, (metric, &c)) in values.iter_mut().zip(StudyMetric::ALL.iter().zip(&metric_cols)) {
            let text = record.get(c).unwrap_or_default();
            *slot = text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| DatasetError::BadNumber {
                line,
                column: metric.column().to_string(),
                text: text.to_string(),
            })?;
        }
        rows.push(CohortRow { project, strategy, values });
    }
    Ok(CohortDataset { rows })
}
