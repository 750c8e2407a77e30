//! Simulators for the applications. Each experiment draws a
//! statistic from independent per-trial streams, estimates its tails around
//! the lower sample median and compares them with the bound curve.

pub mod binpack;
pub mod fpp;
pub mod spin;
pub mod subseq;
pub mod supsum;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate, BoundQuery};
use crate::error::{Error, Result};
use crate::verify::report::rows_to_csv;
use crate::verify::{
    compare_tail_to_bound, tail_from_samples, ComparisonRow, TailComparison, Verdict,
};

/// Sampling settings shared by every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Thresholds; each experiment has its own default.
    pub grid: Option<Vec<f64>>,
}

impl Default for Run {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            workers: 1,
            grid: None,
        }
    }
}

impl Run {
    fn grid_or(&self, default: &[f64]) -> Result<Vec<f64>> {
        let g = self.grid.clone().unwrap_or_else(|| default.to_vec());
        if g.is_empty() || g.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(Error::InvalidArgument("grid must be nonempty, finite and >= 0".into()));
        }
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppReport {
    pub app: String,
    pub equation: String,
    pub seed: u64,
    pub samples: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub median: f64,
    pub median_ci: [f64; 2],
    pub tails: Vec<TailComparison>,
    pub aux: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl AppReport {
    fn new(app: &str, equation: &str, run: &Run) -> Self {
        Self {
            app: app.to_string(),
            equation: equation.to_string(),
            seed: run.seed,
            samples: run.samples,
            params: BTreeMap::new(),
            median: f64::NAN,
            median_ci: [f64::NAN; 2],
            tails: Vec::new(),
            aux: BTreeMap::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialise"),
        );
    }

    /// Pass iff every tail comparison passes; descriptive reports stay
    /// descriptive.
    fn settle(&mut self) {
        if self.verdict != Verdict::Report {
            self.verdict = Verdict::from_pass(self.tails.iter().all(|t| t.verdict.passed()));
        }
    }

    /// One row per (tail, threshold).
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            app: &'a str,
            label: &'a str,
            equation: &'a str,
            u: f64,
            count: u64,
            n: u64,
            estimate: f64,
            cp_upper: f64,
            bound: f64,
            vacuous: bool,
            pass: bool,
        }
        rows_to_csv(self.tails.iter().flat_map(|t| {
            t.rows.iter().map(move |r: &ComparisonRow| Row {
                app: &self.app,
                label: &t.label,
                equation: &t.equation,
                u: r.u,
                count: r.count,
                n: r.n,
                estimate: r.estimate,
                cp_upper: r.cp_upper,
                bound: r.bound,
                vacuous: r.vacuous,
                pass: r.pass,
            })
        }))
    }
}

/// Tail of `values` on `grid` against the curve `equation`, the threshold
/// being passed as `u` on top of `base`.
fn compare_curve(
    label: &str,
    equation: &str,
    values: &[f64],
    raw: &[f64],
    grid: &[f64],
    seed: u64,
    base: &BoundQuery,
) -> Result<TailComparison> {
    let est = tail_from_samples(label, values, raw, grid, seed)?;
    let bounds = grid
        .iter()
        .map(|&u| {
            let q = BoundQuery {
                u: Some(u),
                ..base.clone()
            };
            Ok((u, evaluate(equation, &q, None)?))
        })
        .collect::<Result<Vec<_>>>()?;
    compare_tail_to_bound(label, &est, &bounds)
}

/// `|x - m|` for every sample.
fn abs_dev(values: &[f64], m: f64) -> Vec<f64> {
    values.iter().map(|v| (v - m).abs()).collect()
}

fn mean(values: &[f64]) -> f64 {
    crate::numeric::kahan_sum(values.iter().copied()) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        let run = Run {
            grid: Some(vec![]),
            ..Default::default()
        };
        assert!(run.grid_or(&[1.0]).is_err());
        assert_eq!(Run::default().grid_or(&[1.0]).unwrap(), vec![1.0]);
        let zero = Run {
            samples: 0,
            ..Default::default()
        };
        assert!(zero.check().is_err());
    }
}
