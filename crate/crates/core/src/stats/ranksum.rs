//! Wilcoxon-Mann-Whitney rank-sum test: normal approximation and exact
//! permutation distribution.

use serde::{Deserialize, Serialize};

use super::{check_finite, normal_cdf, normal_sf, Alternative, StatsError};

/// Largest pooled sample the exact test enumerates.
pub const EXACT_MAX_TOTAL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Sum of the first sample's midranks in the pooled sample.
    pub rank_sum: f64,
    pub expected: f64,
    /// Permutation variance of the rank sum, tie corrected.
    pub variance: f64,
    /// Positive when the first sample tends to be larger.
    pub z: f64,
    pub p_value: f64,
}

/// Midranks (1-based, ties share the mean of their positions) of `values`
/// in their original order.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i+1..=j share rank (i+1+j)/2.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pooled_ranks(x: &[f64], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::TooFewValues { n: x.len().min(y.len()), min: 1 });
    }
    check_finite(x)?;
    check_finite(y)?;
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    Ok(midranks(&pooled))
}

fn tail_p(p_greater: f64, p_less: f64, alternative: Alternative) -> f64 {
    match alternative {
        Alternative::Greater => p_greater,
        Alternative::Less => p_less,
        Alternative::TwoSided => (2.0 * p_greater.min(p_less)).min(1.0),
    }
}

/// Asymptotic test on the standardized rank sum of `x`, with midranks for
/// ties, the tie-corrected permutation variance and no continuity
/// correction.
///
/// Depends on the data only through the pooled ranks, so any strictly
/// increasing transform of the data gives identical results.
pub fn wmw_asymptotic(x: &[f64], y: &[f64], alternative: Alternative) -> Result<RankSumTest, StatsError> {
    let ranks = pooled_ranks(x, y)?;
    let (m, n) = (x.len() as f64, y.len() as f64);
    let total = m + n;
    // Midranks are half-integers, so these sums are exact in f64; that keeps
    // Z(x, y) == -Z(y, x) bit for bit.
    let rank_sum: f64 = ranks[..x.len()].iter().sum();
    let expected = m * (total + 1.0) / 2.0;
    let centre = (total + 1.0) / 2.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let spread: f64 = sorted.iter().map(|r| (r - centre) * (r - centre)).sum();
    if spread == 0.0 {
        return Err(StatsError::DegeneratePooledSample);
    }
    let variance = m * n / (total * (total - 1.0)) * spread;
    let z = (rank_sum - expected) / variance.sqrt();
    let p_value = tail_p(normal_sf(z), normal_cdf(z), alternative);
    Ok(RankSumTest { rank_sum, expected, variance, z, p_value })
}

/// Exact permutation p-value of the rank sum of `x`, by enumerating every
/// split of the pooled midranks into groups of sizes `|x|` and `|y|`.
pub fn wmw_exact(x: &[f64], y: &[f64], alternative: Alternative) -> Result<f64, StatsError> {
    let total = x.len() + y.len();
    if total > EXACT_MAX_TOTAL {
        return Err(StatsError::TooLarge { n: total, max: EXACT_MAX_TOTAL });
    }
    let ranks = pooled_ranks(x, y)?;
    // Doubled midranks are integers.
    let doubled: Vec<u32> = ranks.iter().map(|r| (r * 2.0) as u32).collect();
    let observed: u32 = doubled[..x.len()].iter().sum();
    let m = x.len() as u32;
    let (mut at_most, mut at_least, mut count) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() != m {
            continue;
        }
        let sum: u32 = (0..total).filter(|i| mask & (1 << i) != 0).map(|i| doubled[i]).sum();
        count += 1;
        if sum <= observed {
            at_most += 1;
        }
        if sum >= observed {
            at_least += 1;
        }
    }
    let p_less = at_most as f64 / count as f64;
    let p_greater = at_least as f64 / count as f64;
    Ok(tail_p(p_greater, p_less, alternative))
}
