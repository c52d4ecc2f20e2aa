//! Descriptive and non-parametric statistics for group comparisons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Largest combined sample size for which [`mann_whitney`] enumerates.
pub const EXACT_LIMIT: usize = 12;
/// Largest combined sample size [`mann_whitney_exact`] accepts.
pub const EXACT_MAX: usize = 64;
/// Cohen's d below which two Scott-Knott partitions are merged.
pub const NEGLIGIBLE_D: f64 = 0.2;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("group {0:?} is empty")]
    EmptyGroup(String),
    #[error("exact test limited to {EXACT_MAX} observations, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Mean after dropping `floor(0.1 * n)` values from each end.
    pub trimmed_mean: f64,
}

pub fn descriptive(values: &[f64]) -> Result<GroupSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let cut = n / 10;
    let kept = &sorted[cut..n - cut];
    let trimmed_mean = kept.iter().sum::<f64>() / kept.len() as f64;
    Ok(GroupSummary {
        n,
        mean,
        median,
        trimmed_mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_two_sided: f64,
    pub method: PMethod,
}

/// Midranks of the pooled sample, doubled so ties stay integral.
fn doubled_ranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<u64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let mut ranks = vec![0u64; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1..=j+1, doubled midrank = i + j + 2.
        for item in &pooled[i..=j] {
            ranks[item.1] = (i + j + 2) as u64;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    let rb = ranks.split_off(a.len());
    (ranks, rb, ties)
}

fn u_statistic(ra2: &[u64]) -> f64 {
    let na = ra2.len() as f64;
    ra2.iter().sum::<u64>() as f64 / 2.0 - na * (na + 1.0) / 2.0
}

/// Mann-Whitney U test; exact when `|a| + |b| <= EXACT_LIMIT`.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.len() + b.len() <= EXACT_LIMIT {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

/// Exact two-sided p: the share of all `C(n, |a|)` assignments of the
/// pooled midranks whose rank sum lies at least as far from its mean.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let n = a.len() + b.len();
    if n > EXACT_MAX {
        return Err(StatsError::TooLarge(n));
    }
    let (ra, rb, _) = doubled_ranks(a, b);
    let k = a.len();
    let all: Vec<u64> = ra.iter().chain(&rb).copied().collect();
    let max_sum = all.iter().sum::<u64>() as usize;
    // counts[j][s]: subsets of size j with doubled rank sum s.
    let mut counts = vec![vec![0u128; max_sum + 1]; k + 1];
    counts[0][0] = 1;
    for &r in &all {
        let r = r as usize;
        for j in (1..=k).rev() {
            let (lower, upper) = counts.split_at_mut(j);
            let (src, dst) = (&lower[j - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                dst[s] += src[s - r];
            }
        }
    }
    // Doubled expected rank sum: k * (n + 1).
    let centre = (k * (n + 1)) as i64;
    let observed = (ra.iter().sum::<u64>() as i64 - centre).abs();
    let mut extreme = 0u128;
    let mut total = 0u128;
    for (s, &c) in counts[k].iter().enumerate() {
        total += c;
        if (s as i64 - centre).abs() >= observed {
            extreme += c;
        }
    }
    Ok(MannWhitney {
        u: u_statistic(&ra),
        p_two_sided: extreme as f64 / total as f64,
        method: PMethod::Exact,
    })
}

/// Normal approximation with tie-corrected variance and continuity
/// correction.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let (ra, _, ties) = doubled_ranks(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let u = u_statistic(&ra);
    let mu = na * nb / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let var = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        (2.0 * (1.0 - std_normal.cdf(z))).clamp(0.0, 1.0)
    };
    Ok(MannWhitney {
        u,
        p_two_sided: p,
        method: PMethod::Normal,
    })
}

/// `(#(a > b) - #(a < b)) / (|a| |b|)`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for &x in a {
        let below = sorted.partition_point(|&y| y < x) as i64;
        let above = (sorted.len() - sorted.partition_point(|&y| y <= x)) as i64;
        dominance += below - above;
    }
    Ok(dominance as f64 / (a.len() * b.len()) as f64)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Cohen's d with pooled standard deviation. Zero spread gives 0 for equal
/// means and infinity otherwise.
pub fn cohens_d(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let dof = (a.len() + b.len()) as f64 - 2.0;
    let pooled = if dof > 0.0 {
        ((ss(a, ma) + ss(b, mb)) / dof).sqrt()
    } else {
        0.0
    };
    let diff = (ma - mb).abs();
    if pooled == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / pooled
    }
}

/// Scott-Knott ESD ranking: groups sorted by mean (descending) are split
/// recursively where the between-partition sum of squares peaks; a split
/// stands only if Cohen's d across it is at least [`NEGLIGIBLE_D`].
/// Rank 1 holds the largest means.
pub fn scott_knott_esd(
    groups: &BTreeMap<String, Vec<f64>>,
) -> Result<BTreeMap<String, usize>, StatsError> {
    if groups.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if let Some((name, _)) = groups.iter().find(|(_, v)| v.is_empty()) {
        return Err(StatsError::EmptyGroup(name.clone()));
    }
    let mut ordered: Vec<(&String, &Vec<f64>, f64)> =
        groups.iter().map(|(k, v)| (k, v, mean(v))).collect();
    ordered.sort_by(|x, y| y.2.total_cmp(&x.2).then_with(|| x.0.cmp(y.0)));
    let values: Vec<&[f64]> = ordered.iter().map(|g| g.1.as_slice()).collect();

    let mut clusters = Vec::new();
    split_recursive(&values, 0, values.len(), &mut clusters);
    let mut ranks = BTreeMap::new();
    for (rank, (lo, hi)) in clusters.into_iter().enumerate() {
        for g in &ordered[lo..hi] {
            ranks.insert(g.0.clone(), rank + 1);
        }
    }
    Ok(ranks)
}

fn split_recursive(groups: &[&[f64]], lo: usize, hi: usize, out: &mut Vec<(usize, usize)>) {
    if hi - lo < 2 {
        out.push((lo, hi));
        return;
    }
    let stats: Vec<(f64, f64)> = groups[lo..hi]
        .iter()
        .map(|g| (g.len() as f64, g.iter().sum::<f64>()))
        .collect();
    let n_all: f64 = stats.iter().map(|s| s.0).sum();
    let grand = stats.iter().map(|s| s.1).sum::<f64>() / n_all;
    let (mut n_left, mut s_left) = (0.0, 0.0);
    let mut best: Option<(usize, f64)> = None;
    for k in 1..stats.len() {
        n_left += stats[k - 1].0;
        s_left += stats[k - 1].1;
        let n_right = n_all - n_left;
        let m_left = s_left / n_left;
        let m_right = (grand * n_all - s_left) / n_right;
        let between = n_left * (m_left - grand).powi(2) + n_right * (m_right - grand).powi(2);
        // Relative tolerance so rounding cannot break exact ties.
        if best.is_none_or(|(_, b)| between - b > 1e-9 * b.abs()) {
            best = Some((k, between));
        }
    }
    let (k, _) = best.expect("at least two groups");
    let cut = lo + k;
    let left: Vec<f64> = groups[lo..cut]
        .iter()
        .flat_map(|g| g.iter().copied())
        .collect();
    let right: Vec<f64> = groups[cut..hi]
        .iter()
        .flat_map(|g| g.iter().copied())
        .collect();
    if cohens_d(&left, &right) >= NEGLIGIBLE_D {
        split_recursive(groups, lo, cut, out);
        split_recursive(groups, cut, hi, out);
    } else {
        out.push((lo, hi));
    }
}
