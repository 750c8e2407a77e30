//! Monte Carlo tails with Clopper–Pearson bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::bounds::BoundValue;
use crate::error::{Error, Result};
use crate::numeric::{binomial_cdf, clopper_pearson};
use crate::rng::{stream, with_workers, StreamRng};

/// Two-sided confidence level of every interval.
pub const CONFIDENCE: f64 = 0.99;

/// Exceedances of one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub u: f64,
    pub count: u64,
    pub n: u64,
    pub estimate: f64,
    pub cp_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub statistic: String,
    pub seed: u64,
    pub n: u64,
    /// Lower sample median of the raw statistic.
    pub median: f64,
    pub median_ci: [f64; 2],
    pub rows: Vec<TailRow>,
}

/// `n` draws of `sampler`, draw `i` using stream `i` of `seed`. The output
/// order is the draw order whatever the worker count.
pub fn draw<T, F>(n: u64, seed: u64, workers: usize, sampler: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    with_workers(workers, || {
        (0..n)
            .into_par_iter()
            .map(|i| sampler(&mut stream(seed, i)))
            .collect()
    })
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Order statistic `⌈n/2⌉` (1-based).
pub fn lower_median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let v = sorted(values);
    v[v.len().div_ceil(2) - 1]
}

/// Distribution-free interval `[x_(l), x_(n+1-l)]` for the median with
/// `P(Bin(n, 1/2) <= l - 1) <= (1 - CONFIDENCE)/2`; the whole range when no
/// such `l` exists.
pub fn median_ci(values: &[f64]) -> [f64; 2] {
    let v = sorted(values);
    let n = v.len() as u64;
    let half = (1.0 - CONFIDENCE) / 2.0;
    // largest l in 1..=n/2 with P(Bin <= l-1) <= half
    let (mut lo, mut hi) = (0u64, n / 2);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if binomial_cdf(mid - 1, n, 0.5) <= half {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    if lo == 0 {
        return [v[0], v[v.len() - 1]];
    }
    [v[lo as usize - 1], v[(n - lo) as usize]]
}

/// Exceedance counts `#{v >= u}` of `values` on `grid`; the median fields
/// describe `raw`, the untransformed statistic.
pub fn tail_from_samples(
    statistic: &str,
    values: &[f64],
    raw: &[f64],
    grid: &[f64],
    seed: u64,
) -> Result<TailEstimate> {
    if values.is_empty() || raw.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if grid.iter().any(|u| !u.is_finite()) {
        return Err(Error::InvalidArgument("grid values must be finite".into()));
    }
    let n = values.len() as u64;
    let rows = grid
        .iter()
        .map(|&u| {
            let count = values.iter().filter(|&&v| v >= u).count() as u64;
            TailRow {
                u,
                count,
                n,
                estimate: count as f64 / n as f64,
                cp_upper: clopper_pearson(count, n, 1.0 - CONFIDENCE).1,
            }
        })
        .collect();
    Ok(TailEstimate {
        statistic: statistic.to_string(),
        seed,
        n,
        median: lower_median(raw),
        median_ci: median_ci(raw),
        rows,
    })
}

/// Tail of `sampler` itself: `P(X >= u)` on `grid` from `n` draws.
pub fn mc_tail<F>(
    statistic: &str,
    sampler: F,
    grid: &[f64],
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<TailEstimate>
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let values = draw(n, seed, workers, sampler);
    tail_from_samples(statistic, &values, &values, grid, seed)
}

/// One threshold of a tail-versus-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub u: f64,
    pub count: u64,
    pub n: u64,
    pub estimate: f64,
    pub cp_upper: f64,
    pub bound: f64,
    pub vacuous: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailComparison {
    pub label: String,
    pub equation: String,
    pub rows: Vec<ComparisonRow>,
    pub verdict: Verdict,
}

/// Pass at `u` iff the upper confidence bound is below the bound, or the
/// bound is vacuous. `bounds[i]` must belong to `estimate.rows[i].u`.
pub fn compare_tail_to_bound(
    label: &str,
    estimate: &TailEstimate,
    bounds: &[(f64, BoundValue)],
) -> Result<TailComparison> {
    if bounds.len() != estimate.rows.len()
        || bounds.iter().zip(&estimate.rows).any(|((u, _), r)| *u != r.u)
    {
        let ours: Vec<f64> = estimate.rows.iter().map(|r| r.u).collect();
        let theirs: Vec<f64> = bounds.iter().map(|(u, _)| *u).collect();
        return Err(Error::GridMismatch(format!("estimate grid {ours:?}, bound grid {theirs:?}")));
    }
    let equation = bounds.first().map(|(_, b)| b.equation.clone()).unwrap_or_default();
    let rows: Vec<ComparisonRow> = bounds
        .iter()
        .zip(&estimate.rows)
        .map(|((_, b), r)| {
            let vacuous = b.value >= 1.0;
            ComparisonRow {
                u: r.u,
                count: r.count,
                n: r.n,
                estimate: r.estimate,
                cp_upper: r.cp_upper,
                bound: b.value,
                vacuous,
                pass: vacuous || r.cp_upper <= b.value + 1e-12,
                notes: b.notes.clone(),
            }
        })
        .collect();
    let verdict = Verdict::from_pass(rows.iter().all(|r| r.pass));
    Ok(TailComparison {
        label: label.to_string(),
        equation,
        rows,
        verdict,
    })
}
