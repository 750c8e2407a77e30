//! Minimisation over the convex hull of a finite point family.
//!
//! Two objectives are supported. The squared Euclidean norm is minimised by
//! Wolfe's min-norm-point algorithm, which terminates with an exact support.
//! The separable `Σ ξ(α, s_i)` objective is minimised by Frank–Wolfe with
//! away steps and exact line search.
//!
//! The linear-minimisation oracle is a scan of the family; ties go to the
//! first atom, so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::bounds::{xi_derivative, xi_unchecked};
use crate::error::{Error, Result};

/// Target duality gap.
pub const GAP_TOLERANCE: f64 = 1e-9;
/// Pivot threshold of the affine-hull solves.
pub const PIVOT_THRESHOLD: f64 = 1e-12;
/// Iteration budget of the Frank–Wolfe solver.
pub const FW_MAX_ITERATIONS: usize = 100_000;
const WOLFE_MAX_MAJOR: usize = 10_000;

/// Objective minimised over the hull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    SquaredEuclidean,
    Xi { alpha: f64 },
}

/// Minimiser `s` of the objective over the hull, with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinNormResult {
    pub s: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    /// `(atom index, convex weight)`, sorted by atom index.
    pub support: Vec<(usize, f64)>,
    pub iterations: usize,
}

impl MinNormResult {
    /// `sqrt(value)`; the convex distance when the objective is the
    /// squared norm.
    pub fn distance(&self) -> f64 {
        self.value.sqrt()
    }

    fn at_atom(atoms: &[Vec<f64>], j: usize, value: f64) -> Self {
        Self {
            s: atoms[j].clone(),
            value,
            gap: 0.0,
            support: vec![(j, 1.0)],
            iterations: 0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// First atom minimising `<g, atom>`.
pub fn linear_minimizer(atoms: &[Vec<f64>], g: &[f64]) -> usize {
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (j, p) in atoms.iter().enumerate() {
        let v = dot(g, p);
        if v < best_v {
            best_v = v;
            best = j;
        }
    }
    best
}

fn combination(atoms: &[Vec<f64>], support: &[usize], weights: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; atoms[0].len()];
    for (&j, &w) in support.iter().zip(weights) {
        for (si, pi) in s.iter_mut().zip(&atoms[j]) {
            *si += w * pi;
        }
    }
    s
}

fn validate(atoms: &[Vec<f64>]) -> Result<usize> {
    let first = atoms
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty atom family".into()))?;
    let dim = first.len();
    if atoms.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument("atoms of different dimensions".into()));
    }
    if atoms.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite atom coordinate".into()));
    }
    Ok(dim)
}

/// Minimises `objective` over the convex hull of `atoms`.
pub fn min_norm_point(atoms: &[Vec<f64>], objective: Objective) -> Result<MinNormResult> {
    validate(atoms)?;
    match objective {
        Objective::SquaredEuclidean => wolfe(atoms),
        Objective::Xi { alpha } => {
            if !(alpha >= 1.0 && alpha.is_finite()) {
                return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 1")));
            }
            if atoms.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidArgument("xi objective needs atoms in [0,1]^N".into()));
            }
            frank_wolfe_xi(atoms, alpha)
        }
    }
}

/// Solves `(G + e e^T) μ = e` on the support and normalises `μ` to sum 1,
/// which gives the minimum-norm point of the support's affine hull.
fn affine_minimizer(atoms: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    let m = support.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = dot(&atoms[support[r]], &atoms[support[c]]) + 1.0;
        }
        a[r][m] = 1.0;
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < PIVOT_THRESHOLD {
            return None;
        }
        a.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut mu = vec![0.0; m];
    for r in (0..m).rev() {
        let tail: f64 = (r + 1..m).map(|c| a[r][c] * mu[c]).sum();
        mu[r] = (a[r][m] - tail) / a[r][r];
    }
    let total: f64 = mu.iter().sum();
    if !(total.is_finite() && total.abs() > 0.0) {
        return None;
    }
    Some(mu.into_iter().map(|v| v / total).collect())
}

fn norm_gap(atoms: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let j = linear_minimizer(atoms, x);
    (j, 2.0 * (dot(x, x) - dot(x, &atoms[j])))
}

fn wolfe(atoms: &[Vec<f64>]) -> Result<MinNormResult> {
    let norms: Vec<f64> = atoms.iter().map(|p| dot(p, p)).collect();
    let start = norms
        .iter()
        .enumerate()
        .fold(0, |best, (j, &v)| if v < norms[best] { j } else { best });
    if norms[start] == 0.0 {
        return Ok(MinNormResult::at_atom(atoms, start, 0.0));
    }
    let mut support = vec![start];
    let mut weights = vec![1.0];
    let mut x = atoms[start].clone();
    let mut iterations = 0;

    while iterations < WOLFE_MAX_MAJOR {
        iterations += 1;
        let (j, gap) = norm_gap(atoms, &x);
        if gap <= GAP_TOLERANCE * 1e-3 || support.contains(&j) {
            break;
        }
        support.push(j);
        weights.push(0.0);
        loop {
            let Some(mu) = affine_minimizer(atoms, &support) else {
                // the new atom is affinely dependent on the support: no
                // further progress is possible in exact arithmetic
                let last = support.len() - 1;
                if weights[last] == 0.0 {
                    support.pop();
                    weights.pop();
                }
                break;
            };
            if mu.iter().all(|&m| m > 0.0) {
                weights = mu;
                x = combination(atoms, &support, &weights);
                break;
            }
            // move from the current weights toward μ until a weight hits 0
            let mut theta = 1.0f64;
            for (&l, &m) in weights.iter().zip(&mu) {
                if m <= 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            let mut drop = None;
            for (i, (l, &m)) in weights.iter_mut().zip(&mu).enumerate() {
                *l = (1.0 - theta) * *l + theta * m;
                if m <= 0.0 && drop.is_none() && *l <= 1e-15 {
                    drop = Some(i);
                }
            }
            let keep: Vec<bool> = weights
                .iter()
                .enumerate()
                .map(|(i, &l)| l > 1e-15 && Some(i) != drop)
                .collect();
            let mut k = 0;
            support.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let mut k = 0;
            weights.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            x = combination(atoms, &support, &weights);
            if support.len() == 1 {
                break;
            }
        }
    }

    let (_, gap) = norm_gap(atoms, &x);
    let gap = gap.max(0.0);
    let value = dot(&x, &x);
    if gap > GAP_TOLERANCE {
        return Err(Error::SolverNotConverged {
            iterations,
            gap,
            value,
            best: x,
        });
    }
    Ok(finish(x, value, gap, support, weights, iterations))
}

fn finish(
    s: Vec<f64>,
    value: f64,
    gap: f64,
    support: Vec<usize>,
    weights: Vec<f64>,
    iterations: usize,
) -> MinNormResult {
    let mut support: Vec<(usize, f64)> = support.into_iter().zip(weights).collect();
    support.sort_by_key(|&(j, _)| j);
    MinNormResult {
        s,
        value,
        gap,
        support,
        iterations,
    }
}

fn xi_objective(alpha: f64, s: &[f64]) -> f64 {
    s.iter().map(|&u| xi_unchecked(alpha, u.clamp(0.0, 1.0))).sum()
}

fn xi_gradient(alpha: f64, s: &[f64]) -> Vec<f64> {
    s.iter().map(|&u| xi_derivative(alpha, u)).collect()
}

/// Exact line search of the convex `γ ↦ F(s + γ d)` on `[0, γmax]`.
fn line_search(alpha: f64, s: &[f64], d: &[f64], gamma_max: f64) -> f64 {
    let slope = |g: f64| {
        let p: Vec<f64> = s.iter().zip(d).map(|(a, b)| a + g * b).collect();
        dot(&xi_gradient(alpha, &p), d)
    };
    if slope(gamma_max) <= 0.0 {
        return gamma_max;
    }
    let (mut lo, mut hi) = (0.0, gamma_max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn frank_wolfe_xi(atoms: &[Vec<f64>], alpha: f64) -> Result<MinNormResult> {
    let values: Vec<f64> = atoms.iter().map(|p| xi_objective(alpha, p)).collect();
    let start = values
        .iter()
        .enumerate()
        .fold(0, |best, (j, &v)| if v < values[best] { j } else { best });
    if values[start] == 0.0 {
        return Ok(MinNormResult::at_atom(atoms, start, 0.0));
    }
    let mut support = vec![start];
    let mut weights = vec![1.0];
    let mut s = atoms[start].clone();
    let mut gap = f64::INFINITY;

    for iteration in 0..FW_MAX_ITERATIONS {
        let g = xi_gradient(alpha, &s);
        let gs = dot(&g, &s);
        let j_fw = linear_minimizer(atoms, &g);
        gap = gs - dot(&g, &atoms[j_fw]);
        if gap <= GAP_TOLERANCE {
            let value = xi_objective(alpha, &s);
            return Ok(finish(s, value, gap.max(0.0), support, weights, iteration));
        }
        let (k_away, away_value) = support
            .iter()
            .enumerate()
            .map(|(k, &j)| (k, dot(&g, &atoms[j])))
            .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        let away_gap = away_value - gs;

        if gap >= away_gap || support.len() == 1 {
            let d: Vec<f64> = atoms[j_fw].iter().zip(&s).map(|(p, x)| p - x).collect();
            let gamma = line_search(alpha, &s, &d, 1.0);
            if gamma >= 1.0 {
                support = vec![j_fw];
                weights = vec![1.0];
            } else {
                weights.iter_mut().for_each(|w| *w *= 1.0 - gamma);
                match support.iter().position(|&j| j == j_fw) {
                    Some(k) => weights[k] += gamma,
                    None => {
                        support.push(j_fw);
                        weights.push(gamma);
                    }
                }
            }
        } else {
            let w_away = weights[k_away];
            let gamma_max = w_away / (1.0 - w_away);
            let p_away = &atoms[support[k_away]];
            let d: Vec<f64> = s.iter().zip(p_away).map(|(x, p)| x - p).collect();
            let gamma = line_search(alpha, &s, &d, gamma_max);
            weights.iter_mut().for_each(|w| *w *= 1.0 + gamma);
            weights[k_away] -= gamma * 1.0;
            if gamma >= gamma_max || weights[k_away] <= 1e-15 {
                support.remove(k_away);
                weights.remove(k_away);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        s = combination(atoms, &support, &weights);
    }
    let value = xi_objective(alpha, &s);
    Err(Error::SolverNotConverged {
        iterations: FW_MAX_ITERATIONS,
        gap,
        value,
        best: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::golden_max;
    use proptest::prelude::*;

    fn check_invariants(atoms: &[Vec<f64>], r: &MinNormResult) {
        let total: f64 = r.support.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(r.support.iter().all(|&(_, w)| w >= 0.0));
        let idx: Vec<usize> = r.support.iter().map(|&(j, _)| j).collect();
        let w: Vec<f64> = r.support.iter().map(|&(_, w)| w).collect();
        let s = combination(atoms, &idx, &w);
        for (a, b) in s.iter().zip(&r.s) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(r.gap >= 0.0 && r.gap <= GAP_TOLERANCE);
    }

    #[test]
    fn examples() {
        let atoms = vec![vec![1.0, 1.0]];
        let r = min_norm_point(&atoms, Objective::SquaredEuclidean).unwrap();
        assert_eq!(r.s, vec![1.0, 1.0]);
        assert_eq!(r.value, 2.0);

        let atoms = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = min_norm_point(&atoms, Objective::SquaredEuclidean).unwrap();
        assert!((r.s[0] - 0.5).abs() < 1e-12 && (r.s[1] - 0.5).abs() < 1e-12);
        assert!((r.value - 0.5).abs() < 1e-12);
        check_invariants(&atoms, &r);

        let atoms = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let r = min_norm_point(&atoms, Objective::SquaredEuclidean).unwrap();
        assert!((r.s[0] - 0.5).abs() < 1e-12 && (r.s[1] - 0.5).abs() < 1e-12);
        assert!(r.support.iter().all(|&(j, _)| j != 2));
        check_invariants(&atoms, &r);
    }

    #[test]
    fn errors() {
        assert!(min_norm_point(&[], Objective::SquaredEuclidean).is_err());
        assert!(min_norm_point(&[vec![1.0], vec![1.0, 0.0]], Objective::SquaredEuclidean).is_err());
        assert!(min_norm_point(&[vec![1.0]], Objective::Xi { alpha: 0.5 }).is_err());
        assert!(min_norm_point(&[vec![2.0]], Objective::Xi { alpha: 1.0 }).is_err());
    }

    #[test]
    fn xi_on_segment_matches_golden_section() {
        let a = vec![1.0, 0.0, 1.0, 1.0];
        let b = vec![0.0, 1.0, 1.0, 0.0];
        for alpha in [1.0, 2.0, 5.0] {
            let r = min_norm_point(&[a.clone(), b.clone()], Objective::Xi { alpha }).unwrap();
            let f = |l: f64| {
                let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| l * x + (1.0 - l) * y).collect();
                -xi_objective(alpha, &s)
            };
            let (_, best) = golden_max(f, 0.0, 1.0, 1e-12);
            assert!((r.value - (-best)).abs() < 1e-9, "{alpha}: {} vs {}", r.value, -best);
        }
    }

    #[test]
    fn xi_singleton_is_sum_of_xi() {
        let r = min_norm_point(&[vec![1.0, 1.0]], Objective::Xi { alpha: 1.0 }).unwrap();
        assert!((r.value - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    fn binary_atoms() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..7).prop_flat_map(|n| {
            prop::collection::vec(
                prop::collection::vec(prop::bool::ANY, n)
                    .prop_map(|v| v.into_iter().map(|b| b as u8 as f64).collect::<Vec<f64>>()),
                1..12,
            )
        })
    }

    proptest! {
        #[test]
        fn wolfe_certificate(atoms in binary_atoms()) {
            let r = min_norm_point(&atoms, Objective::SquaredEuclidean).unwrap();
            check_invariants(&atoms, &r);
            // no atom lies strictly on the origin's side of the optimal face
            let ss = dot(&r.s, &r.s);
            for p in &atoms {
                prop_assert!(dot(&r.s, p) >= ss - 1e-9);
            }
            // the best single atom bounds the hull minimum
            let best = atoms.iter().map(|p| dot(p, p)).fold(f64::INFINITY, f64::min);
            prop_assert!(r.value <= best + 1e-12);
        }

        #[test]
        fn xi_bounded_by_squared_norm(atoms in binary_atoms(), alpha in 1.0f64..6.0) {
            let fw = min_norm_point(&atoms, Objective::Xi { alpha }).unwrap();
            let eu = min_norm_point(&atoms, Objective::SquaredEuclidean).unwrap();
            check_invariants(&atoms, &fw);
            prop_assert!(fw.value >= alpha / (2.0 * (alpha + 1.0)) * eu.value - 1e-6);
            let best = atoms.iter().map(|p| xi_objective(alpha, p)).fold(f64::INFINITY, f64::min);
            prop_assert!(fw.value <= best + 1e-12);
        }
    }
}
