//! First-passage percolation on a truncated square lattice.
//!
//! Sites are `(x, y)` with `-n <= x <= n` and `0 <= y <= n`; the passage
//! time runs from `(0, 0)` to `(0, n)`. Edges are numbered row by row:
//! first the `2n (n + 1)` horizontal ones, then the `(2n + 1) n` vertical
//! ones.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{abs_dev, compare_curve, mean, AppReport, Run};
use crate::bounds::BoundQuery;
use crate::error::{Error, Result};
use crate::numeric::{bisect, kahan_sum, quadratic_fit_r2};
use crate::verify::{draw, lower_median, median_ci, Verdict};

/// The lattice of size `n` as an adjacency list.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    width: usize,
    /// `(neighbour, edge)` per site.
    adj: Vec<Vec<(usize, usize)>>,
    edges: usize,
}

impl Lattice {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid size must be positive".into()));
        }
        let width = 2 * n + 1;
        let sites = width * (n + 1);
        let mut adj = vec![Vec::new(); sites];
        let mut e = 0;
        let mut link = |a: usize, b: usize, e: &mut usize| {
            adj[a].push((b, *e));
            adj[b].push((a, *e));
            *e += 1;
        };
        for y in 0..=n {
            for x in 0..width - 1 {
                link(y * width + x, y * width + x + 1, &mut e);
            }
        }
        for y in 0..n {
            for x in 0..width {
                link(y * width + x, (y + 1) * width + x, &mut e);
            }
        }
        Ok(Self { n, width, adj, edges: e })
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn source(&self) -> usize {
        self.n
    }

    fn target(&self) -> usize {
        self.n * self.width + self.n
    }

    fn check(&self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.edges {
            return Err(Error::InvalidArgument(format!(
                "expected {} edge weights, got {}",
                self.edges,
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("edge weight {w} must be finite and >= 0")));
        }
        Ok(())
    }

    /// Dijkstra from the origin to `(0, n)`.
    pub fn passage_time(&self, weights: &[f64]) -> Result<f64> {
        self.check(weights)?;
        Ok(self.dijkstra(weights))
    }

    fn dijkstra(&self, weights: &[f64]) -> f64 {
        #[derive(PartialEq)]
        struct Key(f64);
        impl Eq for Key {}
        impl PartialOrd for Key {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Key {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&other.0)
            }
        }
        let mut dist = vec![f64::INFINITY; self.adj.len()];
        let mut heap = BinaryHeap::new();
        dist[self.source()] = 0.0;
        heap.push(Reverse((Key(0.0), self.source())));
        let target = self.target();
        while let Some(Reverse((Key(d), v))) = heap.pop() {
            if v == target {
                return d;
            }
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adj[v] {
                let nd = d + weights[e];
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((Key(nd), w)));
                }
            }
        }
        dist[target]
    }

    /// Minimum over all self-avoiding paths by depth-first search, pruned
    /// only by the best time so far. Exponential; meant for `n <= 3`.
    pub fn passage_time_exhaustive(&self, weights: &[f64]) -> Result<f64> {
        self.check(weights)?;
        let mut seen = vec![false; self.adj.len()];
        let mut best = f64::INFINITY;
        self.walk(self.source(), 0.0, weights, &mut seen, &mut best);
        Ok(best)
    }

    fn walk(&self, v: usize, t: f64, weights: &[f64], seen: &mut [bool], best: &mut f64) {
        if t >= *best {
            return;
        }
        if v == self.target() {
            *best = t;
            return;
        }
        seen[v] = true;
        for &(w, e) in &self.adj[v] {
            if !seen[w] {
                self.walk(w, t + weights[e], weights, seen, best);
            }
        }
        seen[v] = false;
    }
}

pub fn fpp_passage_time(n: usize, weights: &[f64]) -> Result<f64> {
    Lattice::new(n)?.passage_time(weights)
}

/// Edge weight laws. Each builtin has a scale `K0` with
/// `E exp(X / K0) <= 2` in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WeightDist {
    /// `K0 = 2 / rate`, where the moment equals 2.
    Exponential { rate: f64 },
    /// `min(Exp(rate), cap)`; `K0 = 2 / rate`, moment `2 - exp(-rate cap / 2)`.
    TruncatedExponential { rate: f64, cap: f64 },
    /// Uniform on `[0, b]`; `K0 = b / x` with `(e^x - 1) / x = 2`.
    Uniform { b: f64 },
    /// `K0 = c / ln 2`.
    Constant { c: f64 },
    /// Finite law; `K0` must be supplied.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl Default for WeightDist {
    fn default() -> Self {
        Self::TruncatedExponential { rate: 1.0, cap: 4.0 }
    }
}

fn uniform_root() -> f64 {
    bisect(|x| x.exp_m1() / x - 2.0, 1e-6, 5.0, 1e-15).expect("root is bracketed")
}

impl WeightDist {
    fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidArgument(s));
        match self {
            Self::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => bad(format!("rate {rate} must be > 0")),
            Self::TruncatedExponential { rate, cap }
                if !(*rate > 0.0 && rate.is_finite() && *cap > 0.0 && cap.is_finite()) =>
            {
                bad("rate and cap must be > 0".into())
            }
            Self::Uniform { b } if !(*b > 0.0 && b.is_finite()) => bad(format!("b = {b} must be > 0")),
            Self::Constant { c } if !(*c >= 0.0 && c.is_finite()) => bad(format!("c = {c} must be >= 0")),
            Self::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad("values and probs must be nonempty and of equal length".into());
                }
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || probs.iter().any(|p| !(*p >= 0.0)) {
                    return bad("values must be >= 0 and probabilities nonnegative".into());
                }
                if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return bad("probabilities must sum to 1".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Builtin scale; `None` for a discrete law.
    pub fn default_k0(&self) -> Option<f64> {
        match self {
            Self::Exponential { rate } | Self::TruncatedExponential { rate, .. } => Some(2.0 / rate),
            Self::Uniform { b } => Some(b / uniform_root()),
            Self::Constant { c } => Some(if *c > 0.0 { c / std::f64::consts::LN_2 } else { 1.0 }),
            Self::Discrete { .. } => None,
        }
    }

    /// `E exp(X / k0)`.
    pub fn exp_moment(&self, k0: f64) -> f64 {
        let s = 1.0 / k0;
        match self {
            Self::Exponential { rate } => {
                if s >= *rate {
                    f64::INFINITY
                } else {
                    rate / (rate - s)
                }
            }
            Self::TruncatedExponential { rate, cap } => {
                let d = rate - s;
                let body = if d.abs() < 1e-12 { rate * cap } else { rate / d * (-(d * cap)).exp_m1() * -1.0 };
                body + (-(d * cap)).exp()
            }
            Self::Uniform { b } => {
                let x = b * s;
                x.exp_m1() / x
            }
            Self::Constant { c } => (c * s).exp(),
            Self::Discrete { values, probs } => {
                kahan_sum(values.iter().zip(probs).map(|(v, p)| p * (v * s).exp()))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::TruncatedExponential { rate, cap } => -(-(rate * cap)).exp_m1() / rate,
            Self::Uniform { b } => b / 2.0,
            Self::Constant { c } => *c,
            Self::Discrete { values, probs } => kahan_sum(values.iter().zip(probs).map(|(v, p)| v * p)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { rate } => -(1.0 - rng.random::<f64>()).ln() / rate,
            Self::TruncatedExponential { rate, cap } => (-(1.0 - rng.random::<f64>()).ln() / rate).min(*cap),
            Self::Uniform { b } => b * rng.random::<f64>(),
            Self::Constant { c } => *c,
            Self::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated nonempty")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FppConfig {
    pub n: usize,
    pub weights: WeightDist,
    /// Overrides the builtin `K0`; required for discrete laws.
    pub k0: Option<f64>,
    /// `r = path_scale * n`.
    pub path_scale: f64,
    /// `C'` of the grid corollary.
    pub c_prime: f64,
    pub run: Run,
}

impl Default for FppConfig {
    fn default() -> Self {
        Self {
            n: 20,
            weights: WeightDist::default(),
            k0: None,
            path_scale: 4.0,
            c_prime: 1.0,
            run: Run::default(),
        }
    }
}

/// Descriptive run: the tail of `|T - M|` with the smallest `K` for which
/// `4 exp(-min(u^2/r, u)/K)` covers every Clopper–Pearson upper bound.
pub fn fpp_experiment(cfg: &FppConfig) -> Result<AppReport> {
    cfg.run.check()?;
    cfg.weights.validate()?;
    if !(cfg.path_scale > 0.0 && cfg.c_prime > 0.0) {
        return Err(Error::InvalidArgument("path scale and C' must be > 0".into()));
    }
    let k0 = match (cfg.k0, cfg.weights.default_k0()) {
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(Error::InvalidArgument("K0 is required for a discrete law".into())),
    };
    if !(k0 > 0.0 && k0.is_finite()) {
        return Err(Error::InvalidArgument(format!("K0 = {k0} must be > 0")));
    }
    let moment = cfg.weights.exp_moment(k0);
    if !(moment <= 2.0 + 1e-12) {
        return Err(Error::MomentConditionFailed { k0, value: moment });
    }
    let lattice = Lattice::new(cfg.n)?;
    let grid = cfg.run.grid_or(&[0.25, 0.5, 1.0, 1.5, 2.0, 3.0])?;
    let times = draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
        let w: Vec<f64> = (0..lattice.edge_count()).map(|_| cfg.weights.sample(rng)).collect();
        lattice.dijkstra(&w)
    });
    let m = lower_median(&times);
    let dev = abs_dev(&times, m);
    let r = cfg.path_scale * cfg.n as f64;

    // fit K on the raw estimate first, then report both curves with it
    let probe = compare_curve("|T - M|", "8.3.1", &dev, &times, &grid, cfg.run.seed, &BoundQuery {
        scale: Some(r),
        big_k: Some(1.0),
        ..Default::default()
    })?;
    let fitted = probe
        .rows
        .iter()
        .filter(|row| row.u > 0.0)
        .map(|row| (row.u * row.u / r).min(row.u) / (4.0 / row.cp_upper).ln())
        .fold(0.0, f64::max);
    let big_k = if fitted > 0.0 { fitted } else { f64::MIN_POSITIVE };

    let mut report = AppReport::new("fpp", "8.3.1", &cfg.run);
    report.param("n", cfg.n);
    report.param("weights", &cfg.weights);
    report.param("path_scale", cfg.path_scale);
    report.param("c_prime", cfg.c_prime);
    report.param("grid", &grid);
    report.median = m;
    report.median_ci = median_ci(&times);
    report.tails.push(compare_curve("|T - M|", "8.3.1", &dev, &times, &grid, cfg.run.seed, &BoundQuery {
        scale: Some(r),
        big_k: Some(big_k),
        ..Default::default()
    })?);
    report.tails.push(compare_curve("|T - M|", "8.3.2", &dev, &times, &grid, cfg.run.seed, &BoundQuery {
        n: Some(cfg.n),
        big_k: Some(cfg.c_prime),
        ..Default::default()
    })?);

    let (xs, ys): (Vec<f64>, Vec<f64>) = probe
        .rows
        .iter()
        .filter(|row| row.count > 0)
        .map(|row| (row.u, row.estimate.ln()))
        .unzip();
    let nonincreasing = ys.windows(2).all(|w| w[1] <= w[0]);
    report.aux.insert("fitted_K".into(), fitted);
    report.aux.insert("K0".into(), k0);
    report.aux.insert("moment".into(), moment);
    report.aux.insert("r".into(), r);
    report.aux.insert("mean".into(), mean(&times));
    report.aux.insert("weight_mean".into(), cfg.weights.mean());
    report.aux.insert("log_tail_nonincreasing".into(), if nonincreasing { 1.0 } else { 0.0 });
    if let Some(r2) = quadratic_fit_r2(&xs, &ys) {
        report.aux.insert("log_tail_r2".into(), r2);
    } else {
        report.notes.push("fewer than three thresholds with exceedances; no quadratic fit".into());
    }
    report.notes.push("K is fitted, not asserted; the report is descriptive".into());
    report.verdict = Verdict::Report;
    report.settle();
    Ok(report)
}
