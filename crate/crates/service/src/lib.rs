//! Webhook ingestion and read-only HTTP API for the contest judge.

pub mod analyzer;
pub mod app;
pub mod config;
pub mod payload;
pub mod stub;

use std::future::Future;

use debtjudge_core::{ContestError, LogError};
use thiserror::Error;

pub use analyzer::{AnalyzerClient, AnalyzerError};
pub use app::{router, system_clock, AppState, Clock};
pub use config::{AnalyzerConfig, AuthScheme, ConfigError, ServiceConfig};
pub use payload::{sign, verify_signature, DirectSubmission, PayloadError, WebhookPayload, SIGNATURE_HEADER};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("event log replay failed: {0}")]
    Replay(#[from] ContestError),
    #[error(transparent)]
    Analyzer(#[from] AnalyzerError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

/// Replays the log, binds and serves until `shutdown` resolves.
pub async fn run(config: ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServiceError> {
    let state = AppState::open(&config, system_clock())?;
    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .map_err(|source| ServiceError::Bind { addr: config.bind.clone(), source })?;
    tracing::info!(addr = %config.bind, "listening");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await.map_err(ServiceError::Serve)
}
