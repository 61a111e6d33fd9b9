//! Normality and comparison reports over a cohort, with plain-text and
//! machine-readable renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::dataset::{CohortDataset, Strategy, StudyMetric};
use super::effect::{classify_effect, effect_size_r, EffectClass};
use super::normality::shapiro_wilk;
use super::ranksum::wmw_asymptotic;
use super::summary::BoxplotSummary;
use super::{Alternative, StatsError};

/// Significance level used to flag normality.
const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub metric: StudyMetric,
    pub group: Strategy,
    pub w: f64,
    pub p_value: f64,
    /// `p_value > 0.05`.
    pub normal_not_rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub metric: StudyMetric,
    pub alternative: Alternative,
    pub p_value: f64,
    pub z: f64,
    pub effect_size_r: f64,
    pub cohen_class: EffectClass,
    /// Pooled sample size.
    pub n: usize,
}

/// Shapiro-Wilk on every metric for both groups, metric-major.
pub fn normality_report(d: &CohortDataset) -> Result<Vec<NormalityResult>, StatsError> {
    let mut out = Vec::with_capacity(16);
    for metric in StudyMetric::ALL {
        for group in Strategy::BOTH {
            let sw = shapiro_wilk(&d.group(group, metric))?;
            out.push(NormalityResult {
                metric,
                group,
                w: sw.w,
                p_value: sw.p_value,
                normal_not_rejected: sw.p_value > ALPHA,
            });
        }
    }
    Ok(out)
}

/// One-sided rank-sum test per metric with penalising as the first sample:
/// "less" for comment density, "greater" for everything else.
pub fn comparison_report(d: &CohortDataset) -> Result<Vec<ComparisonResult>, StatsError> {
    StudyMetric::ALL
        .iter()
        .map(|&metric| {
            let alternative = if metric.higher_is_better() { Alternative::Less } else { Alternative::Greater };
            let x = d.group(Strategy::Penalising, metric);
            let y = d.group(Strategy::Rewarding, metric);
            let t = wmw_asymptotic(&x, &y, alternative)?;
            let n = x.len() + y.len();
            let r = effect_size_r(t.z, n)?;
            Ok(ComparisonResult {
                metric,
                alternative,
                p_value: t.p_value,
                z: t.z,
                effect_size_r: r,
                cohen_class: classify_effect(r),
                n,
            })
        })
        .collect()
}

fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            // Text columns left-aligned, numbers right-aligned.
            if i < 2 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "{cell:>w$}");
            }
        }
        s.trim_end().to_string()
    };
    let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let mut out = line(&head);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// One line per metric: penalising W and p, then rewarding W and p.
pub fn render_normality_table(results: &[NormalityResult]) -> String {
    let mut rows = Vec::new();
    for (i, metric) in StudyMetric::ALL.iter().enumerate() {
        let cell = |g: Strategy| results.iter().find(|r| r.metric == *metric && r.group == g);
        let mut row = vec![(i + 1).to_string(), metric.label().to_string()];
        for g in Strategy::BOTH {
            match cell(g) {
                Some(r) => {
                    row.push(format!("{:.2}", r.w));
                    row.push(format!("{:.2}{}", r.p_value, if r.normal_not_rejected { "*" } else { "" }));
                }
                None => row.extend(["-".to_string(), "-".to_string()]),
            }
        }
        if results.iter().any(|r| r.metric == *metric) {
            rows.push(row);
        }
    }
    let mut out = render(&["#", "Metric", "Penalising W", "p-value", "Rewarding W", "p-value"], &rows);
    out.push_str("* p > 0.05: normality not rejected\n");
    out
}

pub fn render_comparison_table(results: &[ComparisonResult]) -> String {
    let rows: Vec<Vec<String>> = results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.metric.label().to_string(),
                r.alternative.to_string(),
                format!("{:.2}", r.p_value),
                format!("{:.2}", r.z),
                format!("{:.2}", r.effect_size_r),
                format!("{} effect", r.cohen_class),
            ]
        })
        .collect();
    render(&["#", "Metric", "H1", "p-value", "Z", "Effect size", "Classification"], &rows)
}

pub fn render_summary_table(summaries: &[BoxplotSummary]) -> String {
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            let mut row = vec![s.metric.label().to_string(), s.group.to_string(), s.n.to_string()];
            row.extend([s.min, s.q1, s.median, s.q3, s.max].iter().map(|v| format!("{v:.4}")));
            row.push(s.outliers.len().to_string());
            row
        })
        .collect();
    render(&["Metric", "Group", "n", "min", "q1", "median", "q3", "max", "outliers"], &rows)
}

/// Machine-readable wrapper for any report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument<T> {
    pub schema_version: u32,
    pub report: String,
    pub penalising_n: usize,
    pub rewarding_n: usize,
    pub results: Vec<T>,
}

impl<T: Serialize> ReportDocument<T> {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(report: impl Into<String>, d: &CohortDataset, results: Vec<T>) -> Self {
        let (penalising_n, rewarding_n) = d.sizes();
        Self { schema_version: Self::SCHEMA_VERSION, report: report.into(), penalising_n, rewarding_n, results }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
