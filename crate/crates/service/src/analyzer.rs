//! Client for the analyzer's `api/measures/component` endpoint.

use std::time::Duration;

use debtjudge_core::measures::MeasuresResponse;
use debtjudge_core::metrics::metric_keys_param;
use debtjudge_core::{parse_measures, AnalysisMeta, MetricSnapshot, MetricsError};
use reqwest::StatusCode;
use thiserror::Error;

use crate::config::{AnalyzerConfig, AuthScheme};

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("analyzer unreachable after {attempts} attempt(s): {message}")]
    Unreachable { attempts: u32, message: String },
    #[error("analyzer rejected credentials (HTTP {0})")]
    AuthFailed(u16),
    #[error("analyzer returned HTTP {status}: {message}")]
    BadStatus { status: u16, message: String },
    #[error("analyzer response malformed: {0}")]
    BadResponse(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone)]
pub struct AnalyzerClient {
    http: reqwest::Client,
    config: AnalyzerConfig,
}

enum Attempt {
    Done(Result<Vec<(String, String)>, AnalyzerError>),
    Retry(String),
}

impl AnalyzerClient {
    pub fn new(config: AnalyzerConfig) -> Result<Self, AnalyzerError> {
        let http = reqwest::Client::builder()
            .timeout(config.timeout())
            .build()
            .map_err(|e| AnalyzerError::Unreachable { attempts: 0, message: e.to_string() })?;
        Ok(Self { http, config })
    }

    fn url(&self) -> String {
        format!("{}/api/measures/component", self.config.base_url.trim_end_matches('/'))
    }

    async fn attempt(&self, project_key: &str) -> Attempt {
        let keys = metric_keys_param();
        let mut req = self.http.get(self.url()).query(&[("component", project_key), ("metricKeys", keys.as_str())]);
        if let Some(token) = &self.config.token {
            req = match self.config.auth {
                AuthScheme::Bearer => req.bearer_auth(token),
                AuthScheme::Basic => req.basic_auth(token, Some("")),
            };
        }
        let resp = match req.send().await {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = resp.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Attempt::Done(Err(AnalyzerError::AuthFailed(status.as_u16())));
        }
        if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry(format!("HTTP {status}"));
        }
        let body = match resp.text().await {
            Ok(b) => b,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        if !status.is_success() {
            return Attempt::Done(Err(AnalyzerError::BadStatus { status: status.as_u16(), message: body }));
        }
        Attempt::Done(
            serde_json::from_str::<MeasuresResponse>(&body)
                .map(|r| r.pairs())
                .map_err(|e| AnalyzerError::BadResponse(e.to_string())),
        )
    }

    /// Raw `(metric, value)` pairs for a project. Connection failures,
    /// timeouts, 5xx and 429 are retried with exponential backoff.
    pub async fn fetch_measures(&self, project_key: &str) -> Result<Vec<(String, String)>, AnalyzerError> {
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(project_key).await {
                Attempt::Done(r) => return r,
                Attempt::Retry(message) if attempts > self.config.retries => {
                    return Err(AnalyzerError::Unreachable { attempts, message });
                }
                Attempt::Retry(message) => {
                    tracing::warn!(project_key, attempts, %message, "analyzer fetch failed, retrying");
                    tokio::time::sleep(delay).await;
                    delay *= 2;
                }
            }
        }
    }

    pub async fn fetch_snapshot(&self, meta: AnalysisMeta) -> Result<MetricSnapshot, AnalyzerError> {
        let pairs = self.fetch_measures(&meta.project_key).await?;
        Ok(parse_measures(&pairs, meta)?)
    }
}
