//! Distances from a point to an event.
//!
//! All functionals are exact: the combinatorial ones scan the event, and the
//! convex-hull ones go through the certified solvers in [`minnorm`].

pub mod minnorm;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use minnorm::{min_norm_point, MinNormResult, Objective, GAP_TOLERANCE};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::spaces::{Event, FiniteSpace, Point, ProductSpace};

/// Largest number of helper tuples the q-point distance will scan.
pub const TUPLE_BUDGET: u64 = 1_000_000;

/// Per-coordinate penalties of the weighted Hamming distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightProfile(Vec<f64>);

impl WeightProfile {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("profile entries must be finite and >= 0".into()));
        }
        if !a.iter().any(|&v| v > 0.0) {
            return Err(Error::InvalidArgument("profile needs a positive entry".into()));
        }
        Ok(Self(a))
    }

    pub fn unit(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }
}

impl TryFrom<Vec<f64>> for WeightProfile {
    type Error = Error;
    fn try_from(a: Vec<f64>) -> Result<Self> {
        Self::new(a)
    }
}

impl From<WeightProfile> for Vec<f64> {
    fn from(w: WeightProfile) -> Self {
        w.0
    }
}

/// Nonnegative penalty `h` on a single alphabet, vanishing on the diagonal,
/// together with the factor measure used for its norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyKernel {
    h: Vec<Vec<f64>>,
    mu: Vec<f64>,
    norm2: f64,
    norm_inf: f64,
}

impl PenaltyKernel {
    pub fn new(h: Vec<Vec<f64>>, mu: &FiniteSpace) -> Result<Self> {
        let k = mu.size();
        if h.len() != k || h.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidArgument(format!(
                "kernel must be {k}x{k} to match the alphabet"
            )));
        }
        for (i, row) in h.iter().enumerate() {
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidArgument("kernel entries must be finite and >= 0".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidArgument(format!("kernel diagonal h({i},{i}) != 0")));
            }
        }
        let mu = mu.weights().to_vec();
        let mut ms = KahanSum::new();
        let mut norm_inf = 0.0f64;
        for (i, row) in h.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                ms.add(mu[i] * mu[j] * v * v);
                norm_inf = norm_inf.max(v);
            }
        }
        Ok(Self {
            norm2: ms.value().sqrt(),
            norm_inf,
            h,
            mu,
        })
    }

    /// `h(ω, ω') = c` for `ω != ω'`.
    pub fn zero_one(mu: &FiniteSpace, c: f64) -> Result<Self> {
        let k = mu.size();
        let h = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { c }).collect())
            .collect();
        Self::new(h, mu)
    }

    pub fn size(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self, a: usize, b: usize) -> f64 {
        self.h[a][b]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.h
    }

    /// Root mean square of `h` under `μ ⊗ μ`.
    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    fn integrate(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let mut s = KahanSum::new();
        for (i, &mi) in self.mu.iter().enumerate() {
            for (j, &mj) in self.mu.iter().enumerate() {
                s.add(mi * mj * f(i, j));
            }
        }
        s.value()
    }

    /// `∬ exp(t h)`.
    pub fn exp_integral(&self, t: f64) -> f64 {
        self.integrate(|i, j| (t * self.h[i][j]).exp())
    }

    /// `½ ∬ (e^{tv} + e^{-tv})` with `v = max(h, hᵀ)`.
    pub fn cosh_integral(&self, t: f64) -> f64 {
        self.integrate(|i, j| (t * self.h[i][j].max(self.h[j][i])).cosh())
    }

    /// `∬ (e^h + e^{-h} - 2)`.
    pub fn excess_integral(&self) -> f64 {
        self.integrate(|i, j| 2.0 * (self.h[i][j].cosh() - 1.0))
    }
}

fn check(space: &ProductSpace, a: &Event, x: &Point) -> Result<()> {
    space.validate_point(x)?;
    if a.is_empty() {
        return Err(Error::InvalidEvent("event is empty".into()));
    }
    if let Some(y) = a.points().first() {
        if y.len() != space.dim() {
            return Err(Error::InvalidEvent("event points have the wrong dimension".into()));
        }
    }
    Ok(())
}

/// `min_{y ∈ A} Σ {a_i : x_i != y_i}`, with unit weights by default.
pub fn hamming_distance(
    space: &ProductSpace,
    a: &Event,
    x: &Point,
    profile: Option<&WeightProfile>,
) -> Result<f64> {
    check(space, a, x)?;
    if let Some(w) = profile {
        if w.weights().len() != space.dim() {
            return Err(Error::InvalidArgument(format!(
                "profile has length {}, space has dimension {}",
                w.weights().len(),
                space.dim()
            )));
        }
    }
    let cost = |i: usize| profile.map_or(1.0, |w| w.weights()[i]);
    let best = a
        .points()
        .iter()
        .map(|y| {
            (0..x.len())
                .filter(|&i| x[i] != y[i])
                .map(cost)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// `min_{y ∈ A} card{i : x_i = 1, y_i = 0}` on a product of two-point spaces.
pub fn one_sided_distance(space: &ProductSpace, a: &Event, x: &Point) -> Result<usize> {
    check(space, a, x)?;
    if space.factors().iter().any(|f| f.size() != 2) {
        return Err(Error::InvalidSpace("one-sided distance needs two-point factors".into()));
    }
    Ok(a.points()
        .iter()
        .map(|y| (0..x.len()).filter(|&i| x[i] == 1 && y[i] == 0).count())
        .min()
        .unwrap_or(0))
}

/// `min_{y ∈ A} Σ h(x_i, y_i)`.
pub fn penalty_distance(
    space: &ProductSpace,
    a: &Event,
    x: &Point,
    kernel: &PenaltyKernel,
) -> Result<f64> {
    check(space, a, x)?;
    if space.factors().iter().any(|f| f.size() != kernel.size()) {
        return Err(Error::InvalidArgument(format!(
            "kernel alphabet of size {} does not match every factor",
            kernel.size()
        )));
    }
    Ok(a.points()
        .iter()
        .map(|y| (0..x.len()).map(|i| kernel.h(x[i], y[i])).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

/// Coordinates where `y` agrees with `x`, as a bitset.
fn match_mask(x: &Point, y: &Point) -> Vec<u64> {
    let mut m = vec![0u64; x.len().div_ceil(64)];
    for i in 0..x.len() {
        if x[i] == y[i] {
            m[i / 64] |= 1 << (i % 64);
        }
    }
    m
}

/// Fewest coordinates of `x` that no helper of the best tuple
/// `(y^1 ∈ A_1, ..., y^q ∈ A_q)` matches.
///
/// Every tuple is evaluated; the tuple count must not exceed
/// [`TUPLE_BUDGET`].
pub fn q_point_distance(space: &ProductSpace, sets: &[&Event], x: &Point) -> Result<usize> {
    if sets.len() < 2 {
        return Err(Error::InvalidArgument(format!("q = {} must be >= 2", sets.len())));
    }
    for a in sets {
        check(space, a, x)?;
    }
    let count: u128 = sets.iter().map(|a| a.len() as u128).product();
    if count > TUPLE_BUDGET as u128 {
        return Err(Error::TupleBudgetExceeded {
            count,
            budget: TUPLE_BUDGET,
        });
    }
    // only the agreement pattern of each helper matters
    let masks: Vec<Vec<Vec<u64>>> = sets
        .iter()
        .map(|a| {
            let mut seen = HashSet::new();
            a.points()
                .iter()
                .map(|y| match_mask(x, y))
                .filter(|m| seen.insert(m.clone()))
                .collect()
        })
        .collect();
    let n = x.len();
    let words = n.div_ceil(64);
    let mut best = n;
    let mut acc = vec![vec![0u64; words]; sets.len() + 1];
    scan(&masks, 0, &mut acc, n, &mut best);
    Ok(best)
}

fn scan(masks: &[Vec<Vec<u64>>], depth: usize, acc: &mut [Vec<u64>], n: usize, best: &mut usize) {
    if depth == masks.len() {
        let covered: u32 = acc[depth].iter().map(|w| w.count_ones()).sum();
        *best = (*best).min(n - covered as usize);
        return;
    }
    for m in &masks[depth] {
        for w in 0..m.len() {
            acc[depth + 1][w] = acc[depth][w] | m[w];
        }
        scan(masks, depth + 1, acc, n, best);
        if *best == 0 {
            return;
        }
    }
}

/// Distinct mismatch patterns `1[x_i != y_i]` of the points of `A`, with
/// the index in `A` of the first point producing each pattern.
fn mismatch_atoms<'a>(
    points: impl Iterator<Item = &'a [usize]>,
    x: &[usize],
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut seen = HashSet::new();
    let mut atoms = Vec::new();
    let mut origin = Vec::new();
    for (idx, y) in points.enumerate() {
        let pattern: Vec<bool> = x.iter().zip(y).map(|(a, b)| a != b).collect();
        if seen.insert(pattern.clone()) {
            atoms.push(pattern.into_iter().map(|b| b as u8 as f64).collect());
            origin.push(idx);
        }
    }
    (atoms, origin)
}

fn relabel(mut r: MinNormResult, origin: &[usize]) -> MinNormResult {
    for (j, _) in r.support.iter_mut() {
        *j = origin[*j];
    }
    r.support.sort_by_key(|&(j, _)| j);
    r
}

/// Checks that the direction `s*` separates the hull: every atom `p`
/// satisfies `<s*, p> >= |s*|^2 - gap`.
pub fn dual_check(atoms: &[Vec<f64>], r: &MinNormResult) -> Result<()> {
    let ss: f64 = r.s.iter().map(|v| v * v).sum();
    let min_linear = atoms
        .iter()
        .map(|p| p.iter().zip(&r.s).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    // slack for rounding in the inner products
    let threshold = ss - r.gap;
    if min_linear < threshold - 1e-12 * ss.max(1.0) {
        return Err(Error::DualCheckFailed {
            min_linear,
            threshold,
        });
    }
    Ok(())
}

fn convex_core(atoms: Vec<Vec<f64>>, origin: Vec<usize>) -> Result<MinNormResult> {
    let r = min_norm_point(&atoms, Objective::SquaredEuclidean)?;
    dual_check(&atoms, &r)?;
    Ok(relabel(r, &origin))
}

/// Min-norm point of the hull of the mismatch patterns of `A` seen from
/// `x`. The convex distance is `result.distance()`. Support indices refer
/// to `A.points()`.
pub fn convex_distance(space: &ProductSpace, a: &Event, x: &Point) -> Result<MinNormResult> {
    check(space, a, x)?;
    let (atoms, origin) = mismatch_atoms(a.points().iter().map(|p| p.coords()), x);
    convex_core(atoms, origin)
}

/// `min_{s ∈ V_A(x)} Σ ξ(α, s_i)`, with its certificate.
pub fn xi_distance_result(
    space: &ProductSpace,
    a: &Event,
    x: &Point,
    alpha: f64,
) -> Result<MinNormResult> {
    check(space, a, x)?;
    let (atoms, origin) = mismatch_atoms(a.points().iter().map(|p| p.coords()), x);
    let r = min_norm_point(&atoms, Objective::Xi { alpha })?;
    Ok(relabel(r, &origin))
}

pub fn xi_distance(space: &ProductSpace, a: &Event, x: &Point, alpha: f64) -> Result<f64> {
    Ok(xi_distance_result(space, a, x, alpha)?.value)
}

fn validate_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidArgument(format!(
            "permutation of length {} where {n} was expected",
            p.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidArgument(format!("{p:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Convex distance on the symmetric group. Permutations are 0-based; the
/// squared distance is `result.value`.
pub fn perm_convex_distance(a: &[Vec<usize>], sigma: &[usize]) -> Result<MinNormResult> {
    if a.is_empty() {
        return Err(Error::InvalidEvent("set of permutations is empty".into()));
    }
    let n = sigma.len();
    validate_permutation(sigma, n)?;
    for tau in a {
        validate_permutation(tau, n)?;
    }
    let (atoms, origin) = mismatch_atoms(a.iter().map(|t| t.as_slice()), sigma);
    convex_core(atoms, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(v: &[usize]) -> Point {
        Point(v.to_vec())
    }

    fn ev(space: &ProductSpace, pts: &[&[usize]]) -> Event {
        Event::new(space, pts.iter().map(|p| pt(p)).collect()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        let s = ProductSpace::uniform(2, 3).unwrap();
        let a = ev(&s, &[&[0, 0, 0]]);
        assert_eq!(hamming_distance(&s, &a, &pt(&[0, 0, 0]), None).unwrap(), 0.0);
        assert_eq!(hamming_distance(&s, &a, &pt(&[1, 0, 1]), None).unwrap(), 2.0);
        let w = WeightProfile::new(vec![5.0, 1.0, 1.0]).unwrap();
        assert_eq!(hamming_distance(&s, &a, &pt(&[1, 0, 1]), Some(&w)).unwrap(), 6.0);
        let short = WeightProfile::new(vec![1.0]).unwrap();
        assert!(hamming_distance(&s, &a, &pt(&[1, 0, 1]), Some(&short)).is_err());
        assert!(WeightProfile::new(vec![0.0, 0.0]).is_err());
        assert!(WeightProfile::new(vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn one_sided_examples() {
        let s = ProductSpace::uniform(2, 3).unwrap();
        let a = ev(&s, &[&[0, 0, 0]]);
        assert_eq!(one_sided_distance(&s, &a, &pt(&[0, 0, 0])).unwrap(), 0);
        assert_eq!(one_sided_distance(&s, &a, &pt(&[1, 1, 0])).unwrap(), 2);
        let a = ev(&s, &[&[0, 1, 1]]);
        assert_eq!(one_sided_distance(&s, &a, &pt(&[1, 1, 0])).unwrap(), 1);
        let s3 = ProductSpace::uniform(3, 2).unwrap();
        let a = ev(&s3, &[&[0, 0]]);
        assert!(one_sided_distance(&s3, &a, &pt(&[1, 1])).is_err());
    }

    #[test]
    fn penalty_examples() {
        let mu = FiniteSpace::uniform(3).unwrap();
        let s = ProductSpace::uniform(3, 2).unwrap();
        let h = (0..3)
            .map(|i: i32| (0..3).map(|j: i32| (i - j).abs() as f64).collect())
            .collect();
        let k = PenaltyKernel::new(h, &mu).unwrap();
        let a = ev(&s, &[&[0, 0]]);
        assert_eq!(penalty_distance(&s, &a, &pt(&[2, 1]), &k).unwrap(), 3.0);
        assert_eq!(penalty_distance(&s, &a, &pt(&[0, 0]), &k).unwrap(), 0.0);
        assert!(PenaltyKernel::new(vec![vec![1.0]], &FiniteSpace::uniform(1).unwrap()).is_err());
        assert!(PenaltyKernel::new(vec![vec![0.0]], &mu).is_err());
        let k2 = PenaltyKernel::zero_one(&FiniteSpace::uniform(2).unwrap(), 1.0).unwrap();
        assert!(penalty_distance(&s, &a, &pt(&[2, 1]), &k2).is_err());
    }

    #[test]
    fn kernel_norms() {
        let mu = FiniteSpace::new(vec![0.25, 0.75]).unwrap();
        let k = PenaltyKernel::new(vec![vec![0.0, 2.0], vec![1.0, 0.0]], &mu).unwrap();
        let ms: f64 = 0.25 * 0.75 * 4.0 + 0.75 * 0.25 * 1.0;
        assert!((k.norm2() - ms.sqrt()).abs() < 1e-12);
        assert_eq!(k.norm_inf(), 2.0);
        let e = 0.25 * 0.25 + 0.75 * 0.75 + 0.1875 * (2f64.exp() + 1f64.exp());
        assert!((k.exp_integral(1.0) - e).abs() < 1e-12);
        let c = 0.25 * 0.25 + 0.75 * 0.75 + 2.0 * 0.1875 * 2f64.cosh();
        assert!((k.cosh_integral(1.0) - c).abs() < 1e-12);
        let x = 0.1875 * (2.0 * 2f64.cosh() - 2.0 + 2.0 * 1f64.cosh() - 2.0);
        assert!((k.excess_integral() - x).abs() < 1e-12);
    }

    #[test]
    fn q_point_examples() {
        let s = ProductSpace::uniform(2, 2).unwrap();
        let a = ev(&s, &[&[0, 0]]);
        assert_eq!(q_point_distance(&s, &[&a, &a], &pt(&[1, 1])).unwrap(), 2);
        let b = ev(&s, &[&[0, 1], &[1, 0]]);
        assert_eq!(q_point_distance(&s, &[&b, &b], &pt(&[1, 1])).unwrap(), 0);
        let c = ev(&s, &[&[1, 1]]);
        assert_eq!(q_point_distance(&s, &[&c, &a], &pt(&[1, 1])).unwrap(), 0);
        assert!(q_point_distance(&s, &[&a], &pt(&[1, 1])).is_err());
    }

    #[test]
    fn tuple_budget() {
        let s = ProductSpace::uniform(2, 10).unwrap();
        let full = Event::full(&s).unwrap();
        let err = q_point_distance(&s, &[&full, &full], &pt(&[0; 10])).unwrap_err();
        assert!(matches!(err, Error::TupleBudgetExceeded { .. }));
    }

    #[test]
    fn convex_examples() {
        let s = ProductSpace::uniform(2, 2).unwrap();
        let a = ev(&s, &[&[0, 0]]);
        let r = convex_distance(&s, &a, &pt(&[1, 1])).unwrap();
        assert!((r.distance() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(convex_distance(&s, &a, &pt(&[0, 0])).unwrap().distance(), 0.0);
        let a = ev(&s, &[&[0, 0], &[1, 1]]);
        let r = convex_distance(&s, &a, &pt(&[0, 1])).unwrap();
        assert!((r.distance() - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.support.iter().map(|&(j, _)| j).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn xi_examples() {
        let s = ProductSpace::uniform(2, 2).unwrap();
        let a = ev(&s, &[&[0, 0]]);
        let v = xi_distance(&s, &a, &pt(&[1, 1]), 1.0).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(xi_distance(&s, &a, &pt(&[0, 0]), 3.0).unwrap(), 0.0);
        assert!(xi_distance(&s, &a, &pt(&[1, 1]), 0.5).is_err());
    }

    #[test]
    fn permutation_examples() {
        let r = perm_convex_distance(&[vec![0, 1, 2]], &[1, 0, 2]).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = perm_convex_distance(&[vec![1, 0, 2], vec![0, 2, 1]], &[1, 2, 0]).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
        assert_eq!(perm_convex_distance(&[vec![1, 2, 0]], &[1, 2, 0]).unwrap().value, 0.0);
        assert!(perm_convex_distance(&[vec![0, 1]], &[0, 1, 2]).is_err());
        assert!(perm_convex_distance(&[vec![0, 0, 1]], &[0, 1, 2]).is_err());
        assert!(perm_convex_distance(&[], &[0]).is_err());
    }

    fn small_instance() -> impl Strategy<Value = (ProductSpace, Event, Point)> {
        (2usize..4, 1usize..6).prop_flat_map(|(k, n)| {
            let space = ProductSpace::uniform(k, n).unwrap();
            let pts = prop::collection::vec(prop::collection::vec(0..k, n), 1..8);
            let x = prop::collection::vec(0..k, n);
            (Just(space), pts, x).prop_map(|(s, pts, x)| {
                let e = Event::new(&s, pts.into_iter().map(Point).collect()).unwrap();
                (s, e, Point(x))
            })
        })
    }

    proptest! {
        #[test]
        fn hamming_zero_iff_member((s, a, x) in small_instance()) {
            let d = hamming_distance(&s, &a, &x, None).unwrap();
            prop_assert_eq!(d == 0.0, a.contains(&s, &x));
        }

        #[test]
        fn hamming_monotone_in_event((s, a, x) in small_instance(), keep in 1usize..8) {
            let sub: Vec<Point> = a.points().iter().take(keep).cloned().collect();
            let b = Event::new(&s, sub).unwrap();
            prop_assert!(hamming_distance(&s, &a, &x, None).unwrap()
                <= hamming_distance(&s, &b, &x, None).unwrap());
        }

        #[test]
        fn zero_one_kernel_is_hamming((s, a, x) in small_instance()) {
            let k = PenaltyKernel::zero_one(s.factor(0), 1.0).unwrap();
            prop_assert_eq!(penalty_distance(&s, &a, &x, &k).unwrap(),
                hamming_distance(&s, &a, &x, None).unwrap());
        }

        #[test]
        fn helpers_never_hurt((s, a, x) in small_instance(), q in 2usize..4) {
            let sets = vec![&a; q];
            prop_assert!(q_point_distance(&s, &sets, &x).unwrap() as f64
                <= hamming_distance(&s, &a, &x, None).unwrap());
        }

        #[test]
        fn convex_below_hamming((s, a, x) in small_instance()) {
            let r = convex_distance(&s, &a, &x).unwrap();
            prop_assert!(r.value <= hamming_distance(&s, &a, &x, None).unwrap() + 1e-12);
            let total: f64 = r.support.iter().map(|&(_, w)| w).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for &(j, _) in &r.support {
                prop_assert!(j < a.len());
            }
        }
    }
}
