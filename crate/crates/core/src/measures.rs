//! Analyzer measure payloads: the `api/measures/component` response body and
//! the offline per-project export file used for batch grading.
//!
//! An export file is JSON:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "project_key": "sd-18-19-04",
//!   "analysis_id": "final",
//!   "analysed_at": "2019-06-10T12:00:00Z",
//!   "code_grade": 3.0,
//!   "measures": [{ "metric": "ncloc", "value": "1520" }]
//! }
//! ```
//!
//! Only `project_key` and `measures` are required. A verbatim analyzer
//! response (`{"component": {"key": ..., "measures": [...]}}`) is accepted
//! as well.

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::metrics::{parse_measures, AnalysisMeta, MetricSnapshot, MetricsError};

#[derive(Debug, Error)]
pub enum MeasureFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: malformed export: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}: {source}")]
    Metrics { path: String, source: MetricsError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub metric: String,
    #[serde(default)]
    pub value: Value,
}

impl Measure {
    pub fn new(metric: impl Into<String>, value: impl Into<String>) -> Self {
        Self { metric: metric.into(), value: Value::String(value.into()) }
    }

    /// The value as text. Analyzers send strings; hand-written exports may use numbers.
    fn text(&self) -> Option<String> {
        match &self.value {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        }
    }
}

/// Flattens measures into `(metric, value)` pairs, dropping entries that
/// carry no value.
pub fn measure_pairs(measures: &[Measure]) -> Vec<(String, String)> {
    measures.iter().filter_map(|m| m.text().map(|v| (m.metric.clone(), v))).collect()
}

#[derive(Debug, Clone, Deserialize)]
pub struct ComponentMeasures {
    pub key: Option<String>,
    #[serde(default)]
    pub measures: Vec<Measure>,
}

/// Body of `GET api/measures/component`.
#[derive(Debug, Clone, Deserialize)]
pub struct MeasuresResponse {
    pub component: ComponentMeasures,
}

impl MeasuresResponse {
    pub fn pairs(&self) -> Vec<(String, String)> {
        measure_pairs(&self.component.measures)
    }
}

#[derive(Debug, Deserialize)]
struct RawExport {
    #[serde(default)]
    schema_version: Option<u32>,
    project_key: Option<String>,
    analysis_id: Option<String>,
    analysed_at: Option<DateTime<Utc>>,
    code_grade: Option<f64>,
    measures: Option<Vec<Measure>>,
    component: Option<ComponentMeasures>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureExport {
    pub snapshot: MetricSnapshot,
    pub code_grade: Option<f64>,
}

impl MeasureExport {
    pub fn parse(text: &str, path: &str) -> Result<Self, MeasureFileError> {
        let malformed = |message: String| MeasureFileError::Malformed { path: path.to_string(), message };
        let raw: RawExport = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        if let Some(v) = raw.schema_version.filter(|v| *v != 1) {
            return Err(malformed(format!("unsupported schema_version {v}")));
        }
        let (key, measures) = match (raw.measures, raw.component) {
            (Some(m), _) => (raw.project_key, m),
            (None, Some(c)) => (raw.project_key.or(c.key), c.measures),
            (None, None) => return Err(malformed("no measures".into())),
        };
        let project_key = key.filter(|k| !k.is_empty()).ok_or_else(|| malformed("missing project_key".into()))?;
        if let Some(g) = raw.code_grade.filter(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(malformed(format!("code_grade {g} must be non-negative")));
        }
        let meta = AnalysisMeta {
            analysis_id: raw.analysis_id.unwrap_or_else(|| format!("{project_key}@export")),
            analysed_at: raw.analysed_at.unwrap_or(DateTime::<Utc>::UNIX_EPOCH),
            project_key,
        };
        let snapshot = parse_measures(&measure_pairs(&measures), meta)
            .map_err(|source| MeasureFileError::Metrics { path: path.to_string(), source })?;
        Ok(Self { snapshot, code_grade: raw.code_grade })
    }

    pub fn load(path: &Path) -> Result<Self, MeasureFileError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| MeasureFileError::Io { path: display.clone(), source })?;
        Self::parse(&text, &display)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MEASURES: &str = r#"[
        {"metric": "ncloc", "value": "1000"},
        {"metric": "code_smells", "value": "40"},
        {"metric": "sqale_debt_ratio", "value": "2.1"},
        {"metric": "duplicated_lines_density", "value": "3.4"},
        {"metric": "comment_lines_density", "value": "11.0"},
        {"metric": "security_remediation_effort", "value": "0"},
        {"metric": "reliability_remediation_effort", "value": "45"},
        {"metric": "cognitive_complexity", "value": 120},
        {"metric": "complexity", "value": "210"},
        {"metric": "functions", "value": "90"},
        {"metric": "bugs", "value": "1"},
        {"metric": "vulnerabilities", "value": "0"},
        {"metric": "violations", "value": "40"},
        {"metric": "blocker_violations", "value": "0"},
        {"metric": "major_violations", "value": "12"},
        {"metric": "new_bugs"}
    ]"#;

    #[test]
    fn parses_export_file() {
        let text = format!(r#"{{"project_key":"sd-18-19-01","code_grade":2.5,"measures":{MEASURES}}}"#);
        let e = MeasureExport::parse(&text, "x.json").unwrap();
        assert_eq!(e.snapshot.project_key, "sd-18-19-01");
        assert_eq!(e.snapshot.analysis_id, "sd-18-19-01@export");
        assert_eq!(e.snapshot.cognitive_complexity, 120);
        assert_eq!(e.code_grade, Some(2.5));
    }

    #[test]
    fn parses_verbatim_analyzer_response() {
        let text = format!(r#"{{"component":{{"key":"sd-18-19-02","name":"x","measures":{MEASURES}}}}}"#);
        let e = MeasureExport::parse(&text, "x.json").unwrap();
        assert_eq!(e.snapshot.project_key, "sd-18-19-02");
        let resp: MeasuresResponse = serde_json::from_str(&text).unwrap();
        assert_eq!(resp.pairs().len(), 15);
    }

    #[test]
    fn rejects_malformed_exports() {
        assert!(matches!(MeasureExport::parse("{", "x"), Err(MeasureFileError::Malformed { .. })));
        assert!(matches!(
            MeasureExport::parse(&format!(r#"{{"measures":{MEASURES}}}"#), "x"),
            Err(MeasureFileError::Malformed { .. })
        ));
        assert!(matches!(
            MeasureExport::parse(r#"{"project_key":"p","measures":[]}"#, "x"),
            Err(MeasureFileError::Metrics { source: MetricsError::MissingMetric(_), .. })
        ));
    }
}
