//! Inbound request bodies: analyzer webhooks and direct submissions.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use debtjudge_core::measures::{measure_pairs, Measure};
use debtjudge_core::{AnalysisMeta, GateStatus};
use hmac::{Hmac, KeyInit, Mac};
use serde::Deserialize;
use serde_json::Value;
use sha2::Sha256;
use thiserror::Error;

/// Header carrying the hex HMAC-SHA256 of the raw webhook body.
pub const SIGNATURE_HEADER: &str = "x-sonar-webhook-hmac-sha256";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PayloadError {
    #[error("malformed body: {0}")]
    Malformed(String),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("unknown quality gate status {0:?} (expected OK, WARN or ERROR)")]
    BadStatus(String),
    #[error("unparseable timestamp {0:?}")]
    BadTimestamp(String),
}

/// True when `signature` is the hex HMAC-SHA256 of `body` under `secret`.
pub fn verify_signature(secret: &str, body: &[u8], signature: Option<&str>) -> bool {
    let Some(sig) = signature.and_then(|s| hex::decode(s.trim()).ok()) else {
        return false;
    };
    let mut mac = Hmac::<Sha256>::new_from_slice(secret.as_bytes()).expect("any key length");
    mac.update(body);
    mac.verify_slice(&sig).is_ok()
}

pub fn sign(secret: &str, body: &[u8]) -> String {
    let mut mac = Hmac::<Sha256>::new_from_slice(secret.as_bytes()).expect("any key length");
    mac.update(body);
    hex::encode(mac.finalize().into_bytes())
}

/// Accepts RFC 3339 as well as the analyzer's `2020-04-01T10:00:00+0200`.
pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>, PayloadError> {
    DateTime::parse_from_rfc3339(text)
        .or_else(|_| DateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%z"))
        .or_else(|_| DateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f%z"))
        .map(|t| t.with_timezone(&Utc))
        .map_err(|_| PayloadError::BadTimestamp(text.to_string()))
}

fn parse_status(text: &str) -> Result<GateStatus, PayloadError> {
    GateStatus::from_analyzer(text).ok_or_else(|| PayloadError::BadStatus(text.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WebhookPayload {
    pub project_key: String,
    pub analysis_id: String,
    pub analysed_at: DateTime<Utc>,
    pub quality_gate_status: GateStatus,
}

impl WebhookPayload {
    pub fn parse(body: &[u8]) -> Result<Self, PayloadError> {
        let v: Value = serde_json::from_slice(body).map_err(|e| PayloadError::Malformed(e.to_string()))?;
        let text = |ptr: &str| v.pointer(ptr).and_then(Value::as_str).filter(|s| !s.is_empty());
        let project_key = text("/project/key").ok_or(PayloadError::Missing("project.key"))?.to_string();
        let analysis_id =
            text("/taskId").or_else(|| text("/analysisId")).ok_or(PayloadError::Missing("taskId"))?.to_string();
        let analysed_at = parse_timestamp(text("/analysedAt").ok_or(PayloadError::Missing("analysedAt"))?)?;
        let quality_gate_status =
            parse_status(text("/qualityGate/status").ok_or(PayloadError::Missing("qualityGate.status"))?)?;
        Ok(Self { project_key, analysis_id, analysed_at, quality_gate_status })
    }

    pub fn meta(&self) -> AnalysisMeta {
        AnalysisMeta {
            project_key: self.project_key.clone(),
            analysis_id: self.analysis_id.clone(),
            analysed_at: self.analysed_at,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum InlineMeasures {
    List(Vec<Measure>),
    Map(BTreeMap<String, Value>),
}

#[derive(Debug, Deserialize)]
struct RawDirect {
    project_key: String,
    analysis_id: String,
    analysed_at: String,
    quality_gate_status: Option<String>,
    measures: InlineMeasures,
}

/// Body of `POST /submissions`: the analysis identity plus all measures
/// inline, either as `[{"metric", "value"}]` or as a `{metric: value}` map.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSubmission {
    pub meta: AnalysisMeta,
    /// When absent the service evaluates its configured gate.
    pub quality_gate_status: Option<GateStatus>,
    pub measures: Vec<(String, String)>,
}

impl DirectSubmission {
    pub fn parse(body: &[u8]) -> Result<Self, PayloadError> {
        let raw: RawDirect = serde_json::from_slice(body).map_err(|e| PayloadError::Malformed(e.to_string()))?;
        if raw.project_key.is_empty() {
            return Err(PayloadError::Missing("project_key"));
        }
        if raw.analysis_id.is_empty() {
            return Err(PayloadError::Missing("analysis_id"));
        }
        let measures = match raw.measures {
            InlineMeasures::List(list) => measure_pairs(&list),
            InlineMeasures::Map(map) => {
                let list: Vec<Measure> = map.into_iter().map(|(metric, value)| Measure { metric, value }).collect();
                measure_pairs(&list)
            }
        };
        Ok(Self {
            meta: AnalysisMeta {
                project_key: raw.project_key,
                analysis_id: raw.analysis_id,
                analysed_at: parse_timestamp(&raw.analysed_at)?,
            },
            quality_gate_status: raw.quality_gate_status.as_deref().map(parse_status).transpose()?,
            measures,
        })
    }
}
