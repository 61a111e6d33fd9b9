//! Penalty and reward grading policies, and the policy configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::{default_gate, validate_gate, GateCondition, GateError, GateStatus};

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("invalid policy: {0}")]
    Invalid(String),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("cannot read policy file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse policy file {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
}

/// Fraction of the code grade removed for each gate outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenaltyPolicy {
    pub passed_fraction: f64,
    pub warning_fraction: f64,
    pub failed_fraction: f64,
}

impl Default for PenaltyPolicy {
    fn default() -> Self {
        Self { passed_fraction: 0.0, warning_fraction: 0.05, failed_fraction: 0.10 }
    }
}

impl PenaltyPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let f = [self.passed_fraction, self.warning_fraction, self.failed_fraction];
        if f.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(PolicyError::Invalid("penalty fractions must lie in [0, 1]".into()));
        }
        if !(f[0] <= f[1] && f[1] <= f[2]) {
            return Err(PolicyError::Invalid("penalty fractions must be non-decreasing passed <= warning <= failed".into()));
        }
        Ok(())
    }

    pub fn fraction(&self, status: GateStatus) -> f64 {
        match status {
            GateStatus::Passed => self.passed_fraction,
            GateStatus::Warning => self.warning_fraction,
            GateStatus::Failed => self.failed_fraction,
        }
    }
}

pub fn apply_penalty(code_grade: f64, status: GateStatus, p: &PenaltyPolicy) -> f64 {
    code_grade * (1.0 - p.fraction(status))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardPolicy {
    /// Bonus per qualified place, best place first.
    pub bonus_schedule: Vec<f64>,
    pub max_grade: f64,
}

impl Default for RewardPolicy {
    fn default() -> Self {
        Self { bonus_schedule: vec![0.9, 0.6, 0.3], max_grade: 10.0 }
    }
}

impl RewardPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.max_grade.is_finite() && self.max_grade > 0.0) {
            return Err(PolicyError::Invalid("max_grade must be positive".into()));
        }
        if self.bonus_schedule.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(PolicyError::Invalid("bonuses must be positive".into()));
        }
        if self.bonus_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(PolicyError::Invalid("bonus schedule must be strictly decreasing".into()));
        }
        Ok(())
    }
}

/// Contest prerequisites for one team. Only a `Passed` gate qualifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qualification {
    pub team: String,
    pub gate_passed: bool,
    pub all_use_cases_implemented: bool,
}

impl Qualification {
    pub fn qualified(&self) -> bool {
        self.gate_passed && self.all_use_cases_implemented
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Award {
    pub team: String,
    /// 1-based place in the final ranking.
    pub rank: usize,
    pub qualified: bool,
    pub bonus: f64,
}

/// Hands out the bonus schedule, in ranking order, to qualified teams.
///
/// Unqualified teams get nothing and do not use up a slot, so the next
/// qualified team moves into it.
pub fn assign_rewards<F>(final_ranking: &[String], is_qualified: F, r: &RewardPolicy) -> Vec<Award>
where
    F: Fn(&str) -> bool,
{
    let mut slots = r.bonus_schedule.iter();
    final_ranking
        .iter()
        .enumerate()
        .map(|(i, team)| {
            let qualified = is_qualified(team);
            let bonus = if qualified { slots.next().copied().unwrap_or(0.0) } else { 0.0 };
            Award { team: team.clone(), rank: i + 1, qualified, bonus }
        })
        .collect()
}

/// Adds a bonus and truncates at the maximum grade.
pub fn apply_bonus(total_grade: f64, bonus: f64, r: &RewardPolicy) -> f64 {
    (total_grade + bonus).min(r.max_grade)
}

/// Operator-supplied policy file: gate conditions plus penalty and reward
/// settings. Every section is optional and falls back to the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    #[serde(rename = "condition")]
    pub gate: Vec<GateCondition>,
    pub penalty: PenaltyPolicy,
    pub reward: RewardPolicy,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self { gate: default_gate(), penalty: PenaltyPolicy::default(), reward: RewardPolicy::default() }
    }
}

impl PolicyConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| PolicyError::Io { path: display.clone(), source })?;
        let cfg = Self::parse(&text).map_err(|source| PolicyError::Parse { path: display, source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        validate_gate(&self.gate)?;
        self.penalty.validate()?;
        self.reward.validate()
    }
}
