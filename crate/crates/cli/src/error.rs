use debtjudge_core::stats::{DatasetError, StatsError};
use debtjudge_core::{ContestError, LogError, MeasureFileError, PolicyError};
use debtjudge_service::{ConfigError, ServiceError};
use thiserror::Error;

/// Command failure, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 1: bad input content.
    #[error("{0}")]
    Validation(String),
    /// Exit 2: missing or unreadable files, unusable event log, bind failures.
    #[error("{0}")]
    Io(String),
    /// Exit 3.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        match e {
            PolicyError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<LogError> for CliError {
    fn from(e: LogError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<MeasureFileError> for CliError {
    fn from(e: MeasureFileError) -> Self {
        match e {
            MeasureFileError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ContestError> for CliError {
    fn from(e: ContestError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            ConfigError::Policy(p) => p.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Config(c) => c.into(),
            // A log that cannot be replayed is unusable data on disk.
            ServiceError::Log(_) | ServiceError::Replay(_) | ServiceError::Bind { .. } => CliError::Io(e.to_string()),
            ServiceError::Analyzer(_) | ServiceError::Serve(_) => CliError::Internal(e.to_string()),
        }
    }
}
