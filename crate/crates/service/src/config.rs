//! Service configuration: a TOML file overlaid with `DEBTJUDGE_*`
//! environment variables.
//!
//! ```toml
//! bind = "127.0.0.1:8080"
//! data_dir = "data"
//! webhook_secret = "s3cret"
//! gate_file = "gate.toml"
//! policy_file = "policy.toml"
//!
//! [analyzer]
//! base_url = "http://localhost:9000"
//! token = "squ_..."
//! auth = "bearer"        # or "basic" (token as user name)
//! timeout_ms = 5000
//! retries = 3
//! backoff_ms = 200
//!
//! [weights]
//! tdr = 1.0
//! dcd = 1.0
//! pb_re = 1.0
//! sv_re = 1.0
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use debtjudge_core::{GateCondition, PolicyConfig, PolicyError, ScoreWeights};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("environment variable {name}: {message}")]
    Env { name: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthScheme {
    #[default]
    Bearer,
    /// Token sent as the basic-auth user name with an empty password.
    Basic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzerConfig {
    pub base_url: String,
    pub token: Option<String>,
    pub auth: AuthScheme,
    pub timeout_ms: u64,
    pub retries: u32,
    /// Delay before the first retry; doubles on each further attempt.
    pub backoff_ms: u64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            base_url: "http://localhost:9000".into(),
            token: None,
            auth: AuthScheme::Bearer,
            timeout_ms: 10_000,
            retries: 3,
            backoff_ms: 200,
        }
    }
}

impl AnalyzerConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub data_dir: PathBuf,
    pub webhook_secret: Option<String>,
    pub gate_file: Option<PathBuf>,
    pub policy_file: Option<PathBuf>,
    pub analyzer: AnalyzerConfig,
    pub weights: ScoreWeights,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("data"),
            webhook_secret: None,
            gate_file: None,
            policy_file: None,
            analyzer: AnalyzerConfig::default(),
            weights: ScoreWeights::default(),
        }
    }
}

fn parse_env<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Env { name: name.into(), message: e.to_string() })
}

impl ServiceConfig {
    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: display.clone(), source })?;
        Self::parse(&text, &display)
    }

    /// Applies `DEBTJUDGE_*` overrides from the given variables. Unknown
    /// names are ignored. Empty secret/token values unset the field.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let opt = |v: &str| (!v.is_empty()).then(|| v.to_string());
        for (k, v) in vars {
            let (name, v) = (k.as_ref(), v.as_ref());
            match name {
                "DEBTJUDGE_BIND" => self.bind = v.into(),
                "DEBTJUDGE_DATA_DIR" => self.data_dir = v.into(),
                "DEBTJUDGE_WEBHOOK_SECRET" => self.webhook_secret = opt(v),
                "DEBTJUDGE_GATE_FILE" => self.gate_file = opt(v).map(PathBuf::from),
                "DEBTJUDGE_POLICY_FILE" => self.policy_file = opt(v).map(PathBuf::from),
                "DEBTJUDGE_ANALYZER_URL" => self.analyzer.base_url = v.into(),
                "DEBTJUDGE_ANALYZER_TOKEN" => self.analyzer.token = opt(v),
                "DEBTJUDGE_ANALYZER_AUTH" => {
                    self.analyzer.auth = match v {
                        "bearer" => AuthScheme::Bearer,
                        "basic" => AuthScheme::Basic,
                        _ => return Err(ConfigError::Env { name: name.into(), message: "expected bearer or basic".into() }),
                    }
                }
                "DEBTJUDGE_ANALYZER_TIMEOUT_MS" => self.analyzer.timeout_ms = parse_env(name, v)?,
                "DEBTJUDGE_ANALYZER_RETRIES" => self.analyzer.retries = parse_env(name, v)?,
                "DEBTJUDGE_WEIGHT_TDR" => self.weights.tdr = parse_env(name, v)?,
                "DEBTJUDGE_WEIGHT_DCD" => self.weights.dcd = parse_env(name, v)?,
                "DEBTJUDGE_WEIGHT_PB_RE" => self.weights.pb_re = parse_env(name, v)?,
                "DEBTJUDGE_WEIGHT_SV_RE" => self.weights.sv_re = parse_env(name, v)?,
                _ => {}
            }
        }
        Ok(())
    }

    /// File (if any) plus the process environment.
    pub fn from_sources(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply_env(std::env::vars())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.weights.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.analyzer.base_url.starts_with("http://") || self.analyzer.base_url.starts_with("https://")) {
            return Err(ConfigError::Invalid(format!("analyzer base_url {:?} is not an http(s) URL", self.analyzer.base_url)));
        }
        Ok(())
    }

    /// Gate used for direct submissions: the gate file, else the policy
    /// file's conditions, else the built-in default.
    pub fn gate(&self) -> Result<Vec<GateCondition>, ConfigError> {
        match (&self.gate_file, &self.policy_file) {
            (Some(p), _) | (None, Some(p)) => Ok(PolicyConfig::load(p)?.gate),
            (None, None) => Ok(PolicyConfig::default().gate),
        }
    }

    pub fn log_path(&self) -> PathBuf {
        self.data_dir.join("events.jsonl")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_env() {
        let mut cfg = ServiceConfig::parse(
            "bind = \"0.0.0.0:9999\"\n[analyzer]\nbase_url = \"http://sq:9000\"\nretries = 5\n[weights]\ntdr = 2.0\n",
            "test.toml",
        )
        .unwrap();
        assert_eq!(cfg.analyzer.retries, 5);
        assert_eq!(cfg.weights.tdr, 2.0);
        assert_eq!(cfg.weights.dcd, 1.0);
        cfg.apply_env([
            ("DEBTJUDGE_BIND", "127.0.0.1:1"),
            ("DEBTJUDGE_WEBHOOK_SECRET", "k"),
            ("DEBTJUDGE_WEIGHT_SV_RE", "0.5"),
            ("HOME", "/root"),
        ])
        .unwrap();
        assert_eq!(cfg.bind, "127.0.0.1:1");
        assert_eq!(cfg.webhook_secret.as_deref(), Some("k"));
        assert_eq!(cfg.weights.sv_re, 0.5);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = ServiceConfig::default();
        assert!(matches!(cfg.apply_env([("DEBTJUDGE_ANALYZER_RETRIES", "many")]), Err(ConfigError::Env { .. })));
        assert!(ServiceConfig::parse("colour = 1", "x").is_err());
        cfg.weights.tdr = -1.0;
        assert!(cfg.validate().is_err());
    }
}
