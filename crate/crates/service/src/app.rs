//! HTTP surface: router, shared state and handlers.
//!
//! All writes go through one async mutex that owns the event log and the
//! live engine. After each accepted event a fresh immutable copy of the
//! engine is published; readers only ever clone that `Arc`.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, NaiveDate, Utc};
use debtjudge_core::{
    evaluate_gate, parse_measures, ContestEngine, ContestError, EventLog, GateCondition, GateStatus,
    LeaderboardDocument, MetricSnapshot, Submission, API_SCHEMA_VERSION,
};
use parking_lot::RwLock;
use serde::Serialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::analyzer::{AnalyzerClient, AnalyzerError};
use crate::config::ServiceConfig;
use crate::payload::{parse_timestamp, verify_signature, DirectSubmission, WebhookPayload, SIGNATURE_HEADER};
use crate::ServiceError;

/// Source of `received_at` timestamps.
pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(Utc::now)
}

struct Writer {
    log: EventLog,
    engine: ContestEngine,
}

struct Shared {
    writer: Mutex<Writer>,
    view: RwLock<Arc<ContestEngine>>,
    analyzer: AnalyzerClient,
    secret: Option<String>,
    gate: Vec<GateCondition>,
    clock: Clock,
    replayed_events: usize,
}

#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    /// Opens (or creates) the event log under `data_dir` and replays it.
    pub fn open(config: &ServiceConfig, clock: Clock) -> Result<Self, ServiceError> {
        config.validate()?;
        let gate = config.gate()?;
        let (log, events) = EventLog::open(config.log_path())?;
        let engine = ContestEngine::replay(config.weights, &events)?;
        tracing::info!(events = events.len(), submissions = engine.submission_count(), "event log replayed");
        Ok(Self {
            shared: Arc::new(Shared {
                view: RwLock::new(Arc::new(engine.clone())),
                writer: Mutex::new(Writer { log, engine }),
                analyzer: AnalyzerClient::new(config.analyzer.clone())?,
                secret: config.webhook_secret.clone(),
                gate,
                clock,
                replayed_events: events.len(),
            }),
        })
    }

    /// Current immutable view of the contest.
    pub fn snapshot(&self) -> Arc<ContestEngine> {
        self.shared.view.read().clone()
    }

    async fn record(&self, snapshot: MetricSnapshot, gate: GateStatus) -> Result<SubmitResponse, ApiError> {
        let mut w = self.shared.writer.lock().await;
        let team = snapshot.project_key.clone();
        let analysis_id = snapshot.analysis_id.clone();
        let received_at = (self.shared.clock)();
        let event = match w.engine.prepare_submission(&team, snapshot, gate, received_at) {
            Ok(e) => e,
            Err(ContestError::DuplicateAnalysis(_)) => return Ok(SubmitResponse::duplicate(analysis_id)),
            Err(e) => return Err(ApiError::unprocessable(e.to_string())),
        };
        w.log.append(&event).map_err(|e| ApiError::internal(e.to_string()))?;
        let outcome = w
            .engine
            .apply(&event)
            .map_err(|e| ApiError::internal(e.to_string()))?
            .expect("submission event yields an outcome");
        *self.shared.view.write() = Arc::new(w.engine.clone());
        tracing::info!(team = %outcome.team, rank = outcome.rank, score = outcome.score, "submission accepted");
        Ok(SubmitResponse {
            schema_version: API_SCHEMA_VERSION,
            status: "accepted",
            analysis_id,
            submission_id: Some(outcome.submission_id),
            team: Some(outcome.team),
            rank: Some(outcome.rank),
            previous_rank: outcome.previous_rank,
            best_improved: Some(outcome.best_improved),
            score: Some(outcome.score),
        })
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/webhook", post(webhook))
        .route("/submissions", post(direct_submission).get(list_submissions))
        .route("/submissions/{id}", get(get_submission))
        .route("/leaderboard", get(leaderboard))
        .route("/teams/{id}/history", get(history))
        .route("/stats", get(stats))
        .route("/healthz", get(healthz))
        .with_state(state)
}

#[derive(Debug, Clone, Serialize)]
struct SubmitResponse {
    schema_version: u32,
    /// `accepted` or `duplicate` (no-op).
    status: &'static str,
    analysis_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    submission_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    team: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    previous_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_improved: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

impl SubmitResponse {
    fn duplicate(analysis_id: String) -> Self {
        Self {
            schema_version: API_SCHEMA_VERSION,
            status: "duplicate",
            analysis_id,
            submission_id: None,
            team: None,
            rank: None,
            previous_rank: None,
            best_improved: None,
            score: None,
        }
    }
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "unprocessable", message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<AnalyzerError> for ApiError {
    fn from(e: AnalyzerError) -> Self {
        let code = match e {
            AnalyzerError::Unreachable { .. } => "analyzer_unreachable",
            AnalyzerError::AuthFailed(_) => "analyzer_auth_failed",
            AnalyzerError::Metrics(_) => "analyzer_missing_metric",
            _ => "analyzer_bad_response",
        };
        Self::new(StatusCode::BAD_GATEWAY, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "schema_version": API_SCHEMA_VERSION, "error": self.code, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

fn envelope<T: Serialize>(body: T) -> Json<Value> {
    let mut v = serde_json::to_value(body).expect("responses serialize");
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), API_SCHEMA_VERSION.into());
    }
    Json(v)
}

async fn webhook(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    if let Some(secret) = &state.shared.secret {
        let sig = headers.get(SIGNATURE_HEADER).and_then(|v| v.to_str().ok());
        if !verify_signature(secret, &body, sig) {
            return Err(ApiError::new(StatusCode::UNAUTHORIZED, "bad_signature", "webhook signature mismatch"));
        }
    }
    let payload = WebhookPayload::parse(&body).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    if state.snapshot().contains_analysis(&payload.analysis_id) {
        return Ok(Json(SubmitResponse::duplicate(payload.analysis_id)));
    }
    let snapshot = state.shared.analyzer.fetch_snapshot(payload.meta()).await.map_err(|e| {
        tracing::warn!(project = %payload.project_key, error = %e, "analyzer fetch failed; submission dropped");
        ApiError::from(e)
    })?;
    Ok(Json(state.record(snapshot, payload.quality_gate_status).await?))
}

async fn direct_submission(State(state): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let sub = DirectSubmission::parse(&body).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    if state.snapshot().contains_analysis(&sub.meta.analysis_id) {
        return Ok(Json(SubmitResponse::duplicate(sub.meta.analysis_id)));
    }
    let snapshot = parse_measures(&sub.measures, sub.meta).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    debtjudge_core::compute_derived(&snapshot).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let gate = match sub.quality_gate_status {
        Some(g) => g,
        None => evaluate_gate(&snapshot, &state.shared.gate).map_err(|e| ApiError::internal(e.to_string()))?.status,
    };
    Ok(Json(state.record(snapshot, gate).await?))
}

fn query_time(q: &HashMap<String, String>, name: &str) -> Result<Option<DateTime<Utc>>, ApiError> {
    q.get(name)
        .map(|v| parse_timestamp(v).map_err(|e| ApiError::bad_request(format!("{name}: {e}"))))
        .transpose()
}

async fn leaderboard(State(state): State<AppState>, Query(q): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let as_of = query_time(&q, "as_of")?;
    let doc = LeaderboardDocument::new(&state.snapshot().leaderboard(as_of), as_of);
    match q.get("format").map(String::as_str) {
        None | Some("json") => Ok(([(header::CONTENT_TYPE, "application/json")], doc.to_json()).into_response()),
        Some("csv") => Ok(([(header::CONTENT_TYPE, "text/csv")], doc.to_csv()).into_response()),
        Some(other) => Err(ApiError::bad_request(format!("unknown format {other:?}"))),
    }
}

#[derive(Serialize)]
struct SubmissionList<'a> {
    from: DateTime<Utc>,
    to: DateTime<Utc>,
    submissions: Vec<&'a Submission>,
}

async fn list_submissions(
    State(state): State<AppState>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let from = query_time(&q, "from")?.unwrap_or(DateTime::<Utc>::MIN_UTC);
    let to = query_time(&q, "to")?.unwrap_or(DateTime::<Utc>::MAX_UTC);
    let engine = state.snapshot();
    let submissions = engine.submissions_in_range(from, to).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(envelope(SubmissionList { from, to, submissions }))
}

async fn get_submission(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let engine = state.snapshot();
    let id: u64 = id.parse().map_err(|_| ApiError::bad_request(format!("bad submission id {id:?}")))?;
    let sub = engine
        .submissions()
        .iter()
        .find(|s| s.submission_id == id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no submission {id}")))?;
    Ok(envelope(json!({ "submission": sub })))
}

#[derive(Serialize)]
struct HistoryPoint {
    date: NaiveDate,
    rank: usize,
}

async fn history(
    State(state): State<AppState>,
    Path(team): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let until = match q.get("until") {
        Some(d) => d.parse::<NaiveDate>().map_err(|_| ApiError::bad_request(format!("until: bad date {d:?}")))?,
        None => (state.shared.clock)().date_naive(),
    };
    let h = state.snapshot().position_history(&team, until).map_err(|e| match e {
        ContestError::UnknownTeam(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_team", e.to_string()),
        other => ApiError::bad_request(other.to_string()),
    })?;
    let series: Vec<HistoryPoint> = h.series.into_iter().map(|(date, rank)| HistoryPoint { date, rank }).collect();
    Ok(envelope(json!({ "team": h.team, "until": until, "series": series })))
}

async fn stats(State(state): State<AppState>) -> Json<Value> {
    envelope(state.snapshot().stats_summary())
}

async fn healthz(State(state): State<AppState>) -> Json<Value> {
    let engine = state.snapshot();
    envelope(json!({
        "status": "ok",
        "log": "replayed",
        "events_replayed": state.shared.replayed_events,
        "submissions": engine.submission_count(),
        "teams": engine.leaderboard(None).len(),
    }))
}
