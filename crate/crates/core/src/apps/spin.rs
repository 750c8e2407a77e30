//! Sherrington–Kirkpatrick partition function by exact enumeration.
//!
//! `Z_N = 2^{-N} Σ_ε exp((β/√N) Σ_{i<j} h_ij ε_i ε_j)`. The sum is even in
//! `ε`, so `ε_0 = +1` is fixed. The remaining sites split into a block `A`
//! that is enumerated and a block `B = B1 ∪ B2` summed as a bilinear form
//! `u1ᵀ W u2`, where `W` holds the couplings inside `B` and `u1`, `u2` the
//! fields that `A` induces on `B`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{abs_dev, compare_curve, AppReport, Run};
use crate::bounds::{spin_range, BoundQuery};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::verify::{draw, lower_median, median_ci};

pub const MAX_SITES: usize = 24;
/// Size of the block summed by the bilinear form.
const INNER_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disorder {
    Normal,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    Uniform,
}

impl Disorder {
    /// `E exp(h)`, equal to `E exp(-h)` for these symmetric laws.
    pub fn exp_moment(self) -> f64 {
        match self {
            Disorder::Normal => 0.5f64.exp(),
            Disorder::Rademacher => 1f64.cosh(),
            Disorder::Uniform => 3f64.sqrt().sinh() / 3f64.sqrt(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Disorder::Normal => StandardNormal.sample(rng),
            Disorder::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Disorder::Uniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinGlassConfig {
    pub n: usize,
    pub beta: f64,
    pub disorder: Disorder,
}

impl SpinGlassConfig {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        let c = Self {
            n,
            beta,
            disorder: Disorder::Normal,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SITES {
            return Err(Error::InvalidArgument(format!("N = {} must be in 1..={MAX_SITES}", self.n)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidArgument(format!("beta = {} must be in (0, 1]", self.beta)));
        }
        Ok(())
    }

    /// Number of couplings `h_ij`, `i < j`.
    pub fn couplings(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn draw_disorder<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.couplings()).map(|_| self.disorder.sample(rng)).collect()
    }
}

/// Row-major upper triangle: `h_01, h_02, ..., h_12, ...`.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let mut acc = KahanSum::new();
    for l in logs {
        acc.add((l - top).exp());
    }
    top + acc.value().ln()
}

/// Spin of site `k` of a block under bit mask `x`: bit set means `+1`.
fn spin(x: usize, k: usize) -> f64 {
    if x >> k & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `log Z_N` for the couplings `h` (length `N(N-1)/2`).
pub fn spin_glass_log_z(cfg: &SpinGlassConfig, h: &[f64]) -> Result<f64> {
    if cfg.n == 0 || cfg.n > MAX_SITES {
        return Err(Error::InvalidArgument(format!("N = {} must be in 1..={MAX_SITES}", cfg.n)));
    }
    if h.len() != cfg.couplings() {
        return Err(Error::InvalidArgument(format!(
            "expected {} couplings, got {}",
            cfg.couplings(),
            h.len()
        )));
    }
    if !cfg.beta.is_finite() || h.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("couplings and beta must be finite".into()));
    }
    Ok(log_z(cfg.n, cfg.beta, h))
}

fn log_z(n: usize, beta: f64, h: &[f64]) -> f64 {
    if n == 1 {
        return 0.0;
    }
    let scale = beta / (n as f64).sqrt();
    let c = |i: usize, j: usize| scale * h[pair_index(n, i.min(j), i.max(j))];
    // site 0 fixed; A = 1..=a, B = a+1..n
    let b = (n - 1).min(INNER_SITES);
    let a = n - 1 - b;
    let b1 = b / 2;
    let b2 = b - b1;
    let a_site = |k: usize| 1 + k;
    let b_site = |k: usize| 1 + a + k;

    // W[x2 << b1 | x1] = exp(H_B - max H_B)
    let mut hb = vec![0.0; 1 << b];
    for (x, e) in hb.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..b {
            for j in i + 1..b {
                s += c(b_site(i), b_site(j)) * spin(x, i) * spin(x, j);
            }
        }
        *e = s;
    }
    let hb_max = hb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = hb.iter().map(|e| (e - hb_max).exp()).collect();

    let fill = |u: &mut Vec<f64>, g: &[f64]| {
        u.clear();
        u.push(1.0);
        for &gk in g {
            let len = u.len();
            let (minus, plus) = ((-gk - gk.abs()).exp(), (gk - gk.abs()).exp());
            u.extend_from_within(..);
            for x in 0..len {
                u[x] *= minus;
                u[x + len] *= plus;
            }
        }
    };

    let mut logs = Vec::with_capacity(1 << a);
    let (mut g, mut u1, mut u2) = (vec![0.0; b], Vec::new(), Vec::new());
    let mut t = vec![0.0; 1 << b2];
    for xa in 0..1usize << a {
        let mut ha = 0.0;
        for i in 0..a {
            ha += c(0, a_site(i)) * spin(xa, i);
            for j in i + 1..a {
                ha += c(a_site(i), a_site(j)) * spin(xa, i) * spin(xa, j);
            }
        }
        let mut shift = 0.0;
        for (k, gk) in g.iter_mut().enumerate() {
            let mut s = c(0, b_site(k));
            for i in 0..a {
                s += c(a_site(i), b_site(k)) * spin(xa, i);
            }
            *gk = s;
            shift += s.abs();
        }
        fill(&mut u1, &g[..b1]);
        fill(&mut u2, &g[b1..]);
        for (x2, tx) in t.iter_mut().enumerate() {
            let row = &w[x2 << b1..(x2 + 1) << b1];
            *tx = row.iter().zip(&u1).map(|(p, q)| p * q).sum::<f64>();
        }
        let inner: f64 = t.iter().zip(&u2).map(|(p, q)| p * q).sum();
        logs.push(ha + shift + hb_max + inner.ln());
    }
    // 2 Σ_{ε_0 = 1} / 2^N
    log_sum_exp(&logs) + std::f64::consts::LN_2 * (1.0 - n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinExperimentConfig {
    pub model: SpinGlassConfig,
    pub run: Run,
}

/// Tails of `|log Z_N - M|` against the `2 exp(-t²/(32(N-1)))` curve on
/// thresholds inside its range, and the moment ratios of `Z_N`.
pub fn spin_glass_experiment(cfg: &SpinExperimentConfig) -> Result<AppReport> {
    cfg.run.check()?;
    let model = &cfg.model;
    model.validate()?;
    if model.n < 2 {
        return Err(Error::InvalidArgument("N must be >= 2".into()));
    }
    let range = spin_range(model.n);
    let requested = cfg.run.grid_or(&[1.0, 5.0, 10.0, 25.0, 30.0, 40.0])?;
    let grid: Vec<f64> = requested.iter().copied().filter(|&t| t > 0.0 && t <= range).collect();
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("no threshold in (0, {range}]")));
    }
    let log_z: Vec<f64> = draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
        let h = model.draw_disorder(rng);
        log_z(model.n, model.beta, &h)
    });
    let m = lower_median(&log_z);
    let base = BoundQuery {
        n: Some(model.n),
        ..Default::default()
    };

    let mut report = AppReport::new("spin", "12.5", &cfg.run);
    report.param("N", model.n);
    report.param("beta", model.beta);
    report.param("disorder", model.disorder);
    report.param("grid", &grid);
    report.median = m;
    report.median_ci = median_ci(&log_z);
    report.tails.push(compare_curve(
        "|log Z - M|",
        "12.5",
        &abs_dev(&log_z, m),
        &log_z,
        &grid,
        cfg.run.seed,
        &base,
    )?);
    if grid.len() < requested.len() {
        report.notes.push(format!("thresholds outside (0, {range}] dropped"));
    }
    if model.beta >= 1.0 {
        report.notes.push("beta = 1 is outside the curve's hypothesis beta < 1".into());
    }
    if model.disorder.exp_moment() > 2.0 {
        report.notes.push("disorder violates E exp(h) <= 2".into());
    }

    // moments of Z through logs, shifted by the largest value
    let top = log_z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut s1, mut s2) = (KahanSum::new(), KahanSum::new());
    for l in &log_z {
        let z = (l - top).exp();
        s1.add(z);
        s2.add(z * z);
    }
    let n = log_z.len() as f64;
    let log_mean = top + (s1.value() / n).ln();
    let second_ratio = (s2.value() / n) / (s1.value() / n).powi(2);
    let beta2 = model.beta * model.beta;
    let mean_ratio = (log_mean - beta2 * model.n as f64 / 4.0).exp();
    report.aux.insert("mean_log_z".into(), crate::apps::mean(&log_z));
    report.aux.insert("mean_z_ratio".into(), mean_ratio);
    report.aux.insert("fitted_K_mean".into(), mean_ratio.max(1.0 / mean_ratio));
    report.aux.insert("second_moment_ratio".into(), second_ratio);
    if model.beta < 1.0 {
        report.aux.insert("fitted_K_second".into(), second_ratio * (1.0 - beta2));
    }
    report.aux.insert("range".into(), range);
    report.settle();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::verify::Verdict;

    fn brute(n: usize, beta: f64, h: &[f64]) -> f64 {
        let scale = beta / (n as f64).sqrt();
        let logs: Vec<f64> = (0..1usize << n)
            .map(|x| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += scale * h[pair_index(n, i, j)] * spin(x, i) * spin(x, j);
                    }
                }
                s
            })
            .collect();
        log_sum_exp(&logs) - n as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn pair_indexing() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                k += 1;
            }
        }
    }

    #[test]
    fn two_sites_closed_form() {
        let cfg = SpinGlassConfig::new(2, 0.7).unwrap();
        for i in 0..1000 {
            let h = cfg.draw_disorder(&mut stream(3, i));
            let want = (0.7 * h[0] / 2f64.sqrt()).cosh().ln();
            let got = spin_glass_log_z(&cfg, &h).unwrap();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn trivial_cases() {
        let cfg = SpinGlassConfig::new(6, 1.0).unwrap();
        assert!(spin_glass_log_z(&cfg, &vec![0.0; 15]).unwrap().abs() < 1e-14);
        let zero_beta = SpinGlassConfig {
            beta: 0.0,
            ..cfg.clone()
        };
        let h = cfg.draw_disorder(&mut stream(0, 0));
        assert!(spin_glass_log_z(&zero_beta, &h).unwrap().abs() < 1e-14);
        assert!(spin_glass_log_z(&cfg, &h[1..]).is_err());
        assert!(SpinGlassConfig::new(25, 0.5).is_err());
        assert!(SpinGlassConfig::new(4, 1.5).is_err());
    }

    #[test]
    fn blocks_match_brute_force() {
        for n in 1..=16 {
            let cfg = SpinGlassConfig {
                n,
                beta: 0.9,
                disorder: Disorder::Uniform,
            };
            let h = cfg.draw_disorder(&mut stream(n as u64, 1));
            let got = spin_glass_log_z(&cfg, &h).unwrap();
            let want = brute(n, 0.9, &h);
            assert!((got - want).abs() < 1e-11, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn disorder_moments() {
        for d in [Disorder::Normal, Disorder::Rademacher, Disorder::Uniform] {
            assert!(d.exp_moment() <= 2.0);
        }
        // midpoint rule on [-√3, √3]
        let r = 3f64.sqrt();
        let cells = 100_000;
        let quad: f64 = (0..cells)
            .map(|i| (-r + (i as f64 + 0.5) * 2.0 * r / cells as f64).exp())
            .sum::<f64>()
            / cells as f64;
        assert!((Disorder::Uniform.exp_moment() - quad).abs() < 1e-8);
    }

    #[test]
    fn small_run() {
        let cfg = SpinExperimentConfig {
            model: SpinGlassConfig::new(8, 0.5).unwrap(),
            run: Run {
                samples: 5000,
                ..Default::default()
            },
        };
        let r = spin_glass_experiment(&cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.aux["fitted_K_mean"].is_finite());
    }
}
