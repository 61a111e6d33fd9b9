use std::fmt;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Cohen's magnitude classes for the correlation-type effect size r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectClass {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EffectClass::Negligible => "negligible",
            EffectClass::Small => "small",
            EffectClass::Medium => "medium",
            EffectClass::Large => "large",
        }
    }
}

impl fmt::Display for EffectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `r = |Z| / sqrt(N)` with N the pooled sample size.
pub fn effect_size_r(z: f64, n: usize) -> Result<f64, StatsError> {
    if n < 2 {
        return Err(StatsError::InvalidSampleSize(n));
    }
    Ok(z.abs() / (n as f64).sqrt())
}

pub fn classify_effect(r: f64) -> EffectClass {
    match r {
        r if r >= 0.5 => EffectClass::Large,
        r if r >= 0.3 => EffectClass::Medium,
        r if r >= 0.1 => EffectClass::Small,
        _ => EffectClass::Negligible,
    }
}
