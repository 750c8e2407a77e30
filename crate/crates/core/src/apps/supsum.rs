//! Suprema of linear forms, their random-permutation variant and the
//! `q`-point tail for positive summands.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{abs_dev, compare_curve, mean, AppReport, Run};
use crate::bounds::{prop_13_1_rhs, BoundQuery, BoundValue};
use crate::error::{Error, Result};
use crate::numeric::clopper_pearson;
use crate::verify::{
    compare_tail_to_bound, draw, lower_median, median_ci, tail_from_samples, CONFIDENCE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FamilyRaw {
    alphas: Vec<Vec<f64>>,
    #[serde(default)]
    ranges: Option<Vec<f64>>,
}

/// A finite family of coefficient vectors, with coordinate `i` drawn from
/// `[ranges[i], ranges[i] + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRaw")]
pub struct FamilySpec {
    alphas: Vec<Vec<f64>>,
    ranges: Vec<f64>,
    sigma: f64,
    tau: f64,
}

impl TryFrom<FamilyRaw> for FamilySpec {
    type Error = Error;

    fn try_from(raw: FamilyRaw) -> Result<Self> {
        FamilySpec::new(raw.alphas, raw.ranges)
    }
}

impl FamilySpec {
    /// Ranges default to zero.
    pub fn new(alphas: Vec<Vec<f64>>, ranges: Option<Vec<f64>>) -> Result<Self> {
        let n = alphas
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("family must be nonempty".into()))?;
        if n == 0 || alphas.iter().any(|a| a.len() != n) {
            return Err(Error::InvalidArgument("family vectors must share a positive length".into()));
        }
        if alphas.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("family coefficients must be finite".into()));
        }
        let ranges = ranges.unwrap_or_else(|| vec![0.0; n]);
        if ranges.len() != n || ranges.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument(format!("need {n} finite ranges")));
        }
        let sigma = alphas
            .iter()
            .map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let tau = alphas.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        Ok(Self {
            alphas,
            ranges,
            sigma,
            tau,
        })
    }

    /// `{(1, ..., 1) / sqrt(N)}`.
    pub fn singleton(n: usize) -> Result<Self> {
        Self::new(vec![vec![1.0 / (n as f64).sqrt(); n]], None)
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn alphas(&self) -> &[Vec<f64>] {
        &self.alphas
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    /// Largest Euclidean norm in the family.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Largest coefficient in absolute value.
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// `max_α Σ α_i x_i`.
pub fn supsum_statistic(family: &FamilySpec, x: &[f64]) -> Result<f64> {
    if x.len() != family.dim() {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, family has {}",
            x.len(),
            family.dim()
        )));
    }
    Ok(unchecked(family, x))
}

fn unchecked(family: &FamilySpec, x: &[f64]) -> f64 {
    family
        .alphas
        .iter()
        .map(|a| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sample_point<R: Rng + ?Sized>(family: &FamilySpec, rng: &mut R) -> Vec<f64> {
    family.ranges.iter().map(|r| r + rng.random::<f64>()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SupsumMode {
    /// `|Z - M|` against `4 exp(-u^2 / 4σ^2)`.
    Linear,
    /// `Z = max_j Σ_{i in pair j} a_{π(i)}` with `a_i = 1` on the first
    /// half, against the `σ^2` curve.
    PermutationSigma,
    /// Same statistic against the `Σ a_i^2` curve.
    PermutationA,
    /// `P(Z >= qa + t)` with `a` an empirical quantile of `Z`.
    QPoint { q: usize, ks: Vec<usize>, quantile: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupsumConfig {
    pub mode: SupsumMode,
    pub n: usize,
    /// Defaults to the singleton family.
    pub family: Option<FamilySpec>,
    pub run: Run,
}

impl SupsumConfig {
    pub fn new(mode: SupsumMode, n: usize) -> Self {
        Self {
            mode,
            n,
            family: None,
            run: Run::default(),
        }
    }
}

/// Coefficients `1` on the first half, `0` after.
fn half_ones(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i < n / 2 { 1.0 } else { 0.0 }).collect()
}

/// `‖Σ a_{π(i)} e_{⌈i/2⌉}‖_∞`.
fn paired_norm(a: &[f64], perm: &[usize]) -> f64 {
    perm.chunks(2)
        .map(|pair| pair.iter().map(|&i| a[i]).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

pub fn supsum_experiment(cfg: &SupsumConfig) -> Result<AppReport> {
    cfg.run.check()?;
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    match &cfg.mode {
        SupsumMode::Linear => linear(cfg),
        SupsumMode::PermutationSigma | SupsumMode::PermutationA => permutation(cfg),
        SupsumMode::QPoint { q, ks, quantile } => q_point(cfg, *q, ks, *quantile),
    }
}

fn family_of(cfg: &SupsumConfig) -> Result<FamilySpec> {
    let f = match &cfg.family {
        Some(f) => f.clone(),
        None => FamilySpec::singleton(cfg.n)?,
    };
    if f.dim() != cfg.n {
        return Err(Error::InvalidArgument(format!("family dimension {} != N = {}", f.dim(), cfg.n)));
    }
    Ok(f)
}

fn linear(cfg: &SupsumConfig) -> Result<AppReport> {
    let family = family_of(cfg)?;
    let grid = cfg.run.grid_or(&[0.5, 1.0, 2.0, 3.0, 4.0])?;
    let z = draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
        unchecked(&family, &sample_point(&family, rng))
    });
    let m = lower_median(&z);
    let base = BoundQuery {
        scale: Some(family.sigma()),
        ..Default::default()
    };
    let mut report = AppReport::new("supsum", "8.1.1", &cfg.run);
    report.param("N", cfg.n);
    report.param("family_size", family.alphas().len());
    report.param("grid", &grid);
    report.median = m;
    report.median_ci = median_ci(&z);
    report
        .tails
        .push(compare_curve("|Z - M|", "8.1.1", &abs_dev(&z, m), &z, &grid, cfg.run.seed, &base)?);
    report.aux.insert("mean".into(), mean(&z));
    report.aux.insert("sigma".into(), family.sigma());
    report.aux.insert("tau".into(), family.tau());
    report.settle();
    Ok(report)
}

fn permutation(cfg: &SupsumConfig) -> Result<AppReport> {
    let n = cfg.n;
    let a = half_ones(n);
    let (equation, scale, default_grid): (&str, f64, &[f64]) = match cfg.mode {
        // each coordinate functional sees at most two of the vectors
        SupsumMode::PermutationSigma => ("13.17", if n >= 2 { 2.0 } else { 1.0 }, &[0.5, 1.0, 2.0, 5.0, 10.0, 15.0]),
        _ => ("13.18", a.iter().map(|x| x * x).sum::<f64>(), &[1.0, 2.0, 5.0, 10.0, 50.0, 60.0]),
    };
    if scale <= 0.0 {
        return Err(Error::InvalidArgument("need N >= 2 for a nonzero coefficient".into()));
    }
    let grid = cfg.run.grid_or(default_grid)?;
    let z = draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        paired_norm(&a, &perm)
    });
    let m = lower_median(&z);
    let base = BoundQuery {
        scale: Some(scale),
        ..Default::default()
    };
    let mut report = AppReport::new("supsum", equation, &cfg.run);
    report.param("N", n);
    report.param("mode", "permutation");
    report.param("grid", &grid);
    report.median = m;
    report.median_ci = median_ci(&z);
    report
        .tails
        .push(compare_curve("|Z - M|", equation, &abs_dev(&z, m), &z, &grid, cfg.run.seed, &base)?);
    report.aux.insert("mean".into(), mean(&z));
    report.aux.insert("scale".into(), scale);
    report.settle();
    Ok(report)
}

/// Both sides by Monte Carlo. The right side uses the lower confidence
/// bound of `P(Z <= a)` and the upper one of the order-statistic tail, so
/// sampling error only loosens it.
fn q_point(cfg: &SupsumConfig, q: usize, ks: &[usize], quantile: f64) -> Result<AppReport> {
    let family = family_of(cfg)?;
    if q == 0 || ks.is_empty() || ks.iter().any(|&k| k == 0 || k > cfg.n) {
        return Err(Error::InvalidArgument("need q >= 1 and 1 <= k <= N".into()));
    }
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::InvalidArgument(format!("quantile {quantile} not in (0, 1)")));
    }
    if family.ranges().iter().any(|&r| r < 0.0) || family.alphas().iter().flatten().any(|&x| x < 0.0) {
        return Err(Error::InvalidArgument("summands and coefficients must be nonnegative".into()));
    }
    let grid = cfg.run.grid_or(&[0.0, 0.1, 0.2, 0.3, 0.5])?;
    let kmax = *ks.iter().max().expect("nonempty");
    let tau = family.tau();
    // (Z, τ Σ_{i<=k} X*_i for k = 1..=kmax)
    let draws: Vec<(f64, Vec<f64>)> = draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
        let x = sample_point(&family, rng);
        let z = unchecked(&family, &x);
        let mut desc = x;
        desc.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        let tops = desc[..kmax]
            .iter()
            .map(|v| {
                acc += v;
                tau * acc
            })
            .collect();
        (z, tops)
    });
    let z: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let n = z.len() as u64;
    let mut sorted = z.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((quantile * n as f64).ceil() as usize).clamp(1, sorted.len());
    let a = sorted[rank - 1];
    if a <= 0.0 {
        return Err(Error::InvalidArgument(format!("quantile level a = {a} must be > 0")));
    }
    let alpha = 1.0 - CONFIDENCE;
    let below = z.iter().filter(|&&v| v <= a).count() as u64;
    let p_le_a = clopper_pearson(below, n, alpha).0;
    let shifted: Vec<f64> = z.iter().map(|v| v - q as f64 * a).collect();

    let mut report = AppReport::new("supsum", "13.4", &cfg.run);
    report.param("N", cfg.n);
    report.param("q", q);
    report.param("ks", ks);
    report.param("quantile", quantile);
    report.param("grid", &grid);
    report.median = lower_median(&z);
    report.median_ci = median_ci(&z);
    for &k in ks {
        let label = format!("Z - qa (k={k})");
        let est = tail_from_samples(&label, &shifted, &z, &grid, cfg.run.seed)?;
        let bounds: Vec<(f64, BoundValue)> = grid
            .iter()
            .map(|&t| {
                let hits = draws.iter().filter(|d| d.1[k - 1] >= t).count() as u64;
                let top_k = clopper_pearson(hits, n, alpha).1;
                let params = BoundQuery {
                    q: Some(q),
                    k: Some(k as f64),
                    t: Some(t),
                    p_a: Some(p_le_a),
                    ..Default::default()
                };
                (t, BoundValue::new("13.4", &params, prop_13_1_rhs(q, k, p_le_a, top_k)).tail())
            })
            .collect();
        report.tails.push(compare_tail_to_bound(&label, &est, &bounds)?);
    }
    report.aux.insert("a".into(), a);
    report.aux.insert("p_le_a_lower".into(), p_le_a);
    report.aux.insert("tau".into(), tau);
    report.settle();
    Ok(report)
}
