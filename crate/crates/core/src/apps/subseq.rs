//! Longest increasing and longest common subsequences.

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{compare_curve, mean, AppReport, Run};
use crate::bounds::BoundQuery;
use crate::error::{Error, Result};
use crate::verify::{draw, lower_median, median_ci};

/// Longest non-decreasing subsequence, by patience sorting with an
/// upper-bound search so equal values extend a chain.
pub fn lis_length(seq: &[f64]) -> usize {
    let mut tops: Vec<f64> = Vec::new();
    for &x in seq {
        let k = tops.partition_point(|&t| t <= x);
        if k == tops.len() {
            tops.push(x);
        } else {
            tops[k] = x;
        }
    }
    tops.len()
}

/// Longest common subsequence by the bit-parallel row recurrence
/// `V <- (V + (V & M)) | (V & !M)`; the answer is the number of cleared
/// bits of `V`.
pub fn lcs_length<T: Eq + Hash>(a: &[T], b: &[T]) -> usize {
    let m = a.len();
    if m == 0 || b.is_empty() {
        return 0;
    }
    let words = m.div_ceil(64);
    let mut masks: HashMap<&T, Vec<u64>> = HashMap::new();
    for (i, x) in a.iter().enumerate() {
        masks.entry(x).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }
    let mut v = vec![u64::MAX; words];
    for y in b {
        let Some(mk) = masks.get(y) else { continue };
        let mut carry = 0u64;
        for w in 0..words {
            let u = v[w] & mk[w];
            let (s1, c1) = v[w].overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = (c1 || c2) as u64;
            v[w] = s2 | (v[w] & !mk[w]);
        }
    }
    let tail_bits = m % 64;
    let mut zeros = 0usize;
    for (w, &word) in v.iter().enumerate() {
        let live = if w == words - 1 && tail_bits != 0 {
            (1u64 << tail_bits) - 1
        } else {
            u64::MAX
        };
        zeros += (!word & live).count_ones() as usize;
    }
    zeros
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubseqKind {
    Lis,
    Lcs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubseqConfig {
    pub kind: SubseqKind,
    pub n: usize,
    /// Length of the second word (LCS).
    pub n2: usize,
    /// Alphabet size (LCS); letters are uniform.
    pub alphabet: usize,
    pub run: Run,
}

impl SubseqConfig {
    pub fn lis(n: usize) -> Self {
        Self {
            kind: SubseqKind::Lis,
            n,
            n2: n,
            alphabet: 2,
            run: Run::default(),
        }
    }

    pub fn lcs(n: usize, n2: usize, alphabet: usize) -> Self {
        Self {
            kind: SubseqKind::Lcs,
            n,
            n2,
            alphabet,
            run: Run::default(),
        }
    }
}

/// Upper and lower tails around the median against the configuration
/// function curves.
pub fn subsequence_experiment(cfg: &SubseqConfig) -> Result<AppReport> {
    cfg.run.check()?;
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let (app, up_eq, down_eq, default_grid): (&str, &str, &str, &[f64]) = match cfg.kind {
        SubseqKind::Lis => ("lis", "7.1.3", "7.1.4", &[10.0, 20.0, 30.0, 40.0, 50.0]),
        SubseqKind::Lcs => ("lcs", "7.2.1", "7.2.2", &[10.0, 20.0, 50.0, 100.0, 150.0, 200.0]),
    };
    if cfg.kind == SubseqKind::Lcs && (cfg.alphabet == 0 || cfg.n2 == 0) {
        return Err(Error::InvalidArgument("LCS needs a nonempty alphabet and N' > 0".into()));
    }
    let grid = cfg.run.grid_or(default_grid)?;
    let (n, n2, k) = (cfg.n, cfg.n2, cfg.alphabet);
    let values: Vec<f64> = match cfg.kind {
        SubseqKind::Lis => draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
            let seq: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            lis_length(&seq) as f64
        }),
        SubseqKind::Lcs => draw(cfg.run.samples, cfg.run.seed, cfg.run.workers, |rng| {
            let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let b: Vec<usize> = (0..n2).map(|_| rng.random_range(0..k)).collect();
            lcs_length(&a, &b) as f64
        }),
    };
    let m = lower_median(&values);
    let above: Vec<f64> = values.iter().map(|v| v - m).collect();
    let below: Vec<f64> = values.iter().map(|v| m - v).collect();
    let base = BoundQuery {
        median: Some(m),
        ..Default::default()
    };
    let seed = cfg.run.seed;

    let mut report = AppReport::new(app, up_eq, &cfg.run);
    report.param("N", n);
    if cfg.kind == SubseqKind::Lcs {
        report.param("N2", n2);
        report.param("alphabet", k);
    }
    report.param("grid", &grid);
    report.median = m;
    report.median_ci = median_ci(&values);
    report.tails.push(compare_curve("L - M", up_eq, &above, &values, &grid, seed, &base)?);
    report.tails.push(compare_curve("M - L", down_eq, &below, &values, &grid, seed, &base)?);
    report.aux.insert("mean".into(), mean(&values));
    if cfg.kind == SubseqKind::Lis {
        report.aux.insert("median_over_sqrt_n".into(), m / (n as f64).sqrt());
    } else {
        report.aux.insert("median_over_n".into(), m / n.min(n2) as f64);
    }
    report.settle();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn lis_dp(seq: &[f64]) -> usize {
        let mut best = vec![1usize; seq.len()];
        for i in 0..seq.len() {
            for j in 0..i {
                if seq[j] <= seq[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    fn lcs_dp<T: Eq>(a: &[T], b: &[T]) -> usize {
        let mut row = vec![0usize; b.len() + 1];
        for x in a {
            let mut diag = 0;
            for (j, y) in b.iter().enumerate() {
                let up = row[j + 1];
                row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
                diag = up;
            }
        }
        row[b.len()]
    }

    #[test]
    fn lis_examples() {
        assert_eq!(lis_length(&[1.0, 2.0, 3.0]), 3);
        assert_eq!(lis_length(&[3.0, 2.0, 1.0]), 1);
        assert_eq!(lis_length(&[]), 0);
        let pi = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        assert_eq!(lis_dp(&pi), 4);
        assert_eq!(lis_length(&pi), 4);
        assert_eq!(lis_length(&[2.0, 2.0, 2.0]), 3);
    }

    #[test]
    fn lis_matches_dp() {
        for seed in 0..1000u64 {
            let mut rng = stream(seed, 1);
            let n = rng.random_range(0..=200);
            // a small value range forces ties
            let seq: Vec<f64> = (0..n).map(|_| rng.random_range(0..20) as f64).collect();
            assert_eq!(lis_length(&seq), lis_dp(&seq));
        }
    }

    #[test]
    fn lcs_examples() {
        let s = |x: &str| x.chars().collect::<Vec<char>>();
        assert_eq!(lcs_length(&s("abc"), &s("abc")), 3);
        assert_eq!(lcs_length(&s("abc"), &s("xyz")), 0);
        assert_eq!(lcs_length(&s("ABCBDAB"), &s("BDCABA")), 4);
        assert_eq!(lcs_dp(&s("ABCBDAB"), &s("BDCABA")), 4);
    }

    #[test]
    fn lcs_matches_dp() {
        for seed in 0..300u64 {
            let mut rng = stream(seed, 2);
            let n = rng.random_range(0..=200);
            let m = rng.random_range(0..=200);
            let k = rng.random_range(1..=4);
            let a: Vec<u8> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let b: Vec<u8> = (0..m).map(|_| rng.random_range(0..k)).collect();
            assert_eq!(lcs_length(&a, &b), lcs_dp(&a, &b), "seed {seed}");
        }
    }

    #[test]
    fn single_letter_has_no_spread() {
        let mut cfg = SubseqConfig::lis(1);
        cfg.run.samples = 100;
        let r = subsequence_experiment(&cfg).unwrap();
        // the verdict depends on whether 100 samples can resolve the far
        // thresholds, so only the counts are checked
        assert_eq!(r.median, 1.0);
        assert_eq!(r.median_ci, [1.0, 1.0]);
        assert!(r.tails.iter().all(|t| t.rows.iter().all(|row| row.count == 0)));
    }
}
