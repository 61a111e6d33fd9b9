//! Boxplot-ready descriptive statistics.

use serde::{Deserialize, Serialize};

use super::dataset::{CohortDataset, Strategy, StudyMetric};
use super::{check_finite, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub metric: StudyMetric,
    pub group: Strategy,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub iqr: f64,
    /// Most extreme observations inside the 1.5·IQR fences.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Linear-interpolation sample quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(metric: StudyMetric, group: Strategy, values: &[f64]) -> Result<BoxplotSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::TooFewValues { n: 0, min: 1 });
    }
    check_finite(values)?;
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&x, 0.25), quantile(&x, 0.5), quantile(&x, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = |v: &&f64| **v >= lo_fence && **v <= hi_fence;
    Ok(BoxplotSummary {
        metric,
        group,
        n: x.len(),
        min: x[0],
        q1,
        median,
        q3,
        max: x[x.len() - 1],
        iqr,
        whisker_low: *x.iter().find(inside).expect("median lies inside the fences"),
        whisker_high: *x.iter().rev().find(inside).expect("median lies inside the fences"),
        outliers: x.iter().copied().filter(|v| !inside(&v)).collect(),
    })
}

/// Quartiles, whiskers and outliers per metric and strategy.
pub fn summary_stats(d: &CohortDataset) -> Result<Vec<BoxplotSummary>, StatsError> {
    let mut out = Vec::with_capacity(16);
    for metric in StudyMetric::ALL {
        for group in Strategy::BOTH {
            out.push(summarize(metric, group, &d.group(group, metric))?);
        }
    }
    Ok(out)
}
