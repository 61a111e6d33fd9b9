//! Cohort statistics: normality testing, one-sided rank-sum comparisons,
//! effect sizes and descriptive boxplot summaries.

mod dataset;
mod effect;
mod normality;
mod ranksum;
mod report;
mod summary;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub use dataset::{load_dataset, CohortDataset, CohortRow, DatasetError, Strategy, StudyMetric};
pub use effect::{classify_effect, effect_size_r, EffectClass};
pub use normality::{shapiro_wilk, ShapiroWilk};
pub use ranksum::{midranks, wmw_asymptotic, wmw_exact, RankSumTest, EXACT_MAX_TOTAL};
pub use report::{
    comparison_report, normality_report, render_comparison_table, render_normality_table, render_summary_table,
    ComparisonResult, NormalityResult, ReportDocument,
};
pub use summary::{quantile, summary_stats, BoxplotSummary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {min} values, got {n}")]
    TooFewValues { n: usize, min: usize },
    #[error("at most {max} values supported, got {n}")]
    TooManyValues { n: usize, max: usize },
    #[error("sample has zero variance")]
    DegenerateSample,
    #[error("pooled sample has zero variance (all values tied)")]
    DegeneratePooledSample,
    #[error("exact enumeration limited to {max} pooled values, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("effect size needs N >= 2, got {0}")]
    InvalidSampleSize(usize),
}

/// Direction of the alternative hypothesis, stated for the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    /// First sample stochastically larger.
    Greater,
    /// First sample stochastically smaller.
    Less,
    TwoSided,
}

impl Alternative {
    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSided => "two-sided",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            "two-sided" | "two_sided" => Ok(Alternative::TwoSided),
            other => Err(format!("unknown alternative {other:?}")),
        }
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// Upper tail probability `P(Z > z)`.
pub(crate) fn normal_sf(z: f64) -> f64 {
    std_normal().cdf(-z)
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

pub(crate) fn normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}
