//! In-process stand-in for the analyzer's measures endpoint, for tests and
//! local demos.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use parking_lot::Mutex;
use serde_json::json;

#[derive(Default)]
struct StubState {
    projects: Mutex<HashMap<String, Vec<(String, String)>>>,
    token: Mutex<Option<String>>,
    fail_next: AtomicU32,
    requests: AtomicU32,
    last_metric_keys: Mutex<Option<String>>,
}

/// Serves `GET /api/measures/component` from an in-memory project table.
#[derive(Clone)]
pub struct StubAnalyzer {
    state: Arc<StubState>,
    addr: SocketAddr,
}

impl StubAnalyzer {
    /// Binds an ephemeral local port and serves in the background.
    pub async fn start() -> std::io::Result<Self> {
        let state = Arc::new(StubState::default());
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
        let addr = listener.local_addr()?;
        let app = Router::new().route("/api/measures/component", get(measures)).with_state(state.clone());
        tokio::spawn(async move {
            let _ = axum::serve(listener, app).await;
        });
        Ok(Self { state, addr })
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn set_measures(&self, project: &str, measures: Vec<(String, String)>) {
        self.state.projects.lock().insert(project.to_string(), measures);
    }

    /// Require `Authorization: Bearer <token>` (or basic with the token as user).
    pub fn require_token(&self, token: &str) {
        *self.state.token.lock() = Some(token.to_string());
    }

    /// The next `n` requests answer 503.
    pub fn fail_next(&self, n: u32) {
        self.state.fail_next.store(n, Ordering::SeqCst);
    }

    pub fn requests(&self) -> u32 {
        self.state.requests.load(Ordering::SeqCst)
    }

    pub fn last_metric_keys(&self) -> Option<String> {
        self.state.last_metric_keys.lock().clone()
    }
}

fn authorized(expected: &str, headers: &HeaderMap) -> bool {
    let Some(value) = headers.get(header::AUTHORIZATION).and_then(|v| v.to_str().ok()) else {
        return false;
    };
    if value.strip_prefix("Bearer ") == Some(expected) {
        return true;
    }
    value.strip_prefix("Basic ").is_some_and(|b| b == STANDARD.encode(format!("{expected}:")))
}

async fn measures(
    State(state): State<Arc<StubState>>,
    headers: HeaderMap,
    Query(q): Query<HashMap<String, String>>,
) -> Response {
    state.requests.fetch_add(1, Ordering::SeqCst);
    if state.fail_next.load(Ordering::SeqCst) > 0 {
        state.fail_next.fetch_sub(1, Ordering::SeqCst);
        return StatusCode::SERVICE_UNAVAILABLE.into_response();
    }
    if let Some(token) = state.token.lock().clone() {
        if !authorized(&token, &headers) {
            return StatusCode::UNAUTHORIZED.into_response();
        }
    }
    *state.last_metric_keys.lock() = q.get("metricKeys").cloned();
    let Some(key) = q.get("component") else {
        return StatusCode::BAD_REQUEST.into_response();
    };
    let Some(list) = state.projects.lock().get(key).cloned() else {
        return (StatusCode::NOT_FOUND, Json(json!({"errors": [{"msg": format!("Component key '{key}' not found")}]})))
            .into_response();
    };
    let measures: Vec<_> = list.iter().map(|(m, v)| json!({"metric": m, "value": v})).collect();
    Json(json!({"component": {"key": key, "name": key, "qualifier": "TRK", "measures": measures}})).into_response()
}
