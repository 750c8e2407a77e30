//! Finite product probability spaces.
//!
//! A [`ProductSpace`] is an ordered list of finite alphabets, each carrying a
//! probability vector. Points are enumerated in mixed-radix order with the
//! last coordinate varying fastest, which coincides with lexicographic order
//! on coordinate vectors.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;

/// Default limit on the number of points of an enumerable space.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Tolerance within which a weight vector is silently renormalised.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// One coordinate space: a finite alphabet `{0, .., size-1}` with weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpace {
    weights: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSpace(format!("non-positive weight {w}")));
        }
        let total = kahan_sum(weights.iter().copied());
        if (total - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidSpace(format!(
                "weights sum to {total}, not 1 within {RENORMALIZE_TOLERANCE:e}"
            )));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Self {
            weights,
            cumulative,
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSpace("alphabet of size 0".into()));
        }
        Self::new(vec![1.0 / size as f64; size])
    }

    /// Two-point space `{0, 1}` with `P({1}) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, symbol: usize) -> f64 {
        self.weights[symbol]
    }

    /// Inverse-CDF draw from a uniform variate in `[0, 1)`.
    pub fn symbol_for(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.weights.len() - 1)
    }
}

/// A point of a product space: one symbol index per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<usize>);

impl Point {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Deref for Point {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Point {
    fn from(v: Vec<usize>) -> Self {
        Point(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let radix_small = self.0.iter().all(|&c| c < 10);
        if radix_small {
            for c in &self.0 {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

/// The product measure `P = ⊗ μ_i` on `∏ Ω_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    factors: Vec<FiniteSpace>,
    cap: u64,
}

/// Builds a product space from one probability vector per coordinate.
pub fn make_space(weight_vectors: Vec<Vec<f64>>) -> Result<ProductSpace> {
    let factors = weight_vectors
        .into_iter()
        .map(FiniteSpace::new)
        .collect::<Result<Vec<_>>>()?;
    ProductSpace::new(factors)
}

impl ProductSpace {
    pub fn new(factors: Vec<FiniteSpace>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSpace("empty factor list".into()));
        }
        Ok(Self {
            factors,
            cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// `{0, .., k-1}^n` with the uniform measure.
    pub fn uniform(k: usize, n: usize) -> Result<Self> {
        Self::new(vec![FiniteSpace::uniform(k)?; n])
    }

    /// `{0, 1}^n` with `P(x_i = 1) = p` for every coordinate.
    pub fn bernoulli(p: f64, n: usize) -> Result<Self> {
        Self::new(vec![FiniteSpace::bernoulli(p)?; n])
    }

    pub fn with_enumeration_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn enumeration_cap(&self) -> u64 {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[FiniteSpace] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &FiniteSpace {
        &self.factors[i]
    }

    /// Total number of points, saturating at `u128::MAX`.
    pub fn point_count(&self) -> u128 {
        self.factors
            .iter()
            .try_fold(1u128, |acc, f| acc.checked_mul(f.size() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn is_enumerable(&self) -> bool {
        self.point_count() <= self.cap as u128
    }

    fn require_enumerable(&self) -> Result<u64> {
        let count = self.point_count();
        if count > self.cap as u128 {
            return Err(Error::TooLargeToEnumerate {
                count,
                cap: self.cap,
            });
        }
        Ok(count as u64)
    }

    pub fn validate_point(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidPoint(format!(
                "point has {} coordinates, space has {}",
                x.len(),
                self.dim()
            )));
        }
        for (i, (&c, f)) in x.iter().zip(&self.factors).enumerate() {
            if c >= f.size() {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {i} = {c} out of range for alphabet of size {}",
                    f.size()
                )));
            }
        }
        Ok(())
    }

    /// Product weight of a single point.
    pub fn point_mass(&self, x: &Point) -> f64 {
        x.iter()
            .zip(&self.factors)
            .map(|(&c, f)| f.weight(c))
            .product()
    }

    /// Mixed-radix index of a point (last coordinate fastest).
    pub fn index_of(&self, x: &Point) -> u64 {
        x.iter()
            .zip(&self.factors)
            .fold(0u64, |acc, (&c, f)| acc * f.size() as u64 + c as u64)
    }

    pub fn point_at(&self, mut index: u64) -> Point {
        let mut coords = vec![0usize; self.dim()];
        for (slot, f) in coords.iter_mut().zip(&self.factors).rev() {
            let k = f.size() as u64;
            *slot = (index % k) as usize;
            index /= k;
        }
        Point(coords)
    }

    /// Every point with its mass, in enumeration order.
    pub fn enumerate_points(&self) -> Result<PointIter<'_>> {
        let total = self.require_enumerable()?;
        Ok(PointIter {
            space: self,
            next: Some(Point(vec![0; self.dim()])),
            remaining: total,
        })
    }

    /// Draws a point with independent coordinates.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point(
            self.factors
                .iter()
                .map(|f| {
                    if f.size() == 1 {
                        0
                    } else {
                        f.symbol_for(rng.random::<f64>())
                    }
                })
                .collect(),
        )
    }

    /// `Some(p)` when every factor is the two-point space with `P({1}) = p`.
    pub fn common_bernoulli(&self) -> Option<f64> {
        let first = &self.factors[0];
        if first.size() != 2 {
            return None;
        }
        let p = first.weight(1);
        self.factors
            .iter()
            .all(|f| f.size() == 2 && (f.weight(1) - p).abs() <= 1e-12)
            .then_some(p)
    }

    /// `Some(μ)` when all factors share the same alphabet and weights.
    pub fn common_factor(&self) -> Option<&FiniteSpace> {
        let first = &self.factors[0];
        self.factors
            .iter()
            .all(|f| {
                f.size() == first.size()
                    && f.weights
                        .iter()
                        .zip(&first.weights)
                        .all(|(a, b)| (a - b).abs() <= 1e-12)
            })
            .then_some(first)
    }

    pub fn summary(&self) -> String {
        if let Some(f) = self.common_factor() {
            let uniform = f.weights.iter().all(|w| (w - f.weights[0]).abs() <= 1e-12);
            if uniform {
                return format!("uniform{}^{}", f.size(), self.dim());
            }
            if f.size() == 2 {
                return format!("bernoulli{}^{}", f.weight(1), self.dim());
            }
        }
        let sizes: Vec<String> = self.factors.iter().map(|f| f.size().to_string()).collect();
        format!("product[{}]", sizes.join("x"))
    }
}

/// Iterator over `(point, mass)` in enumeration order.
pub struct PointIter<'a> {
    space: &'a ProductSpace,
    next: Option<Point>,
    remaining: u64,
}

impl Iterator for PointIter<'_> {
    type Item = (Point, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        self.remaining -= 1;
        if self.remaining > 0 {
            let mut succ = current.clone();
            for (slot, f) in succ.0.iter_mut().zip(&self.space.factors).rev() {
                *slot += 1;
                if *slot < f.size() {
                    break;
                }
                *slot = 0;
            }
            self.next = Some(succ);
        }
        let mass = self.space.point_mass(&current);
        Some((current, mass))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// `P(A)` recomputed from the space's weights.
pub fn measure_of(space: &ProductSpace, event: &Event) -> Result<f64> {
    for y in event.points() {
        space.validate_point(y)?;
    }
    Ok(kahan_sum(event.points().iter().map(|y| space.point_mass(y))))
}

/// Named builtin events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predicate {
    /// `Σ x_i <= k`
    SumLe(usize),
    /// `Σ x_i >= k`
    SumGe(usize),
    Singleton(Point),
}

/// A nonempty subset of a product space with its cached measure.
///
/// Members are kept sorted in enumeration order; that order is the
/// tie-breaking order used by every distance scan. When the owning space is
/// enumerable a bitset over point indices backs membership tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    points: Vec<Point>,
    bits: Option<Vec<u64>>,
    measure: f64,
}

impl Event {
    pub fn new(space: &ProductSpace, mut points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidEvent("event is empty".into()));
        }
        for y in &points {
            space.validate_point(y)?;
        }
        points.sort();
        points.dedup();
        let measure = kahan_sum(points.iter().map(|y| space.point_mass(y)));
        let bits = space.is_enumerable().then(|| {
            let words = (space.point_count() as usize).div_ceil(64);
            let mut bits = vec![0u64; words];
            for y in &points {
                let idx = space.index_of(y) as usize;
                bits[idx / 64] |= 1 << (idx % 64);
            }
            bits
        });
        Ok(Self {
            points,
            bits,
            measure,
        })
    }

    /// Event from mixed-radix point indices.
    pub fn from_indices(space: &ProductSpace, indices: &[u64]) -> Result<Self> {
        let count = space.require_enumerable()?;
        if let Some(bad) = indices.iter().find(|&&i| i >= count) {
            return Err(Error::InvalidEvent(format!("index {bad} out of range")));
        }
        Self::new(space, indices.iter().map(|&i| space.point_at(i)).collect())
    }

    /// Event whose members are the set bits of `mask` (bit `i` = point `i`).
    pub fn from_mask(space: &ProductSpace, mask: u64) -> Result<Self> {
        let indices: Vec<u64> = (0..64).filter(|b| mask >> b & 1 == 1).collect();
        Self::from_indices(space, &indices)
    }

    pub fn from_predicate(space: &ProductSpace, predicate: &Predicate) -> Result<Self> {
        if let Predicate::Singleton(x) = predicate {
            return Self::new(space, vec![x.clone()]);
        }
        let points: Vec<Point> = space
            .enumerate_points()?
            .map(|(x, _)| x)
            .filter(|x| {
                let s: usize = x.iter().sum();
                match predicate {
                    Predicate::SumLe(k) => s <= *k,
                    Predicate::SumGe(k) => s >= *k,
                    Predicate::Singleton(_) => unreachable!(),
                }
            })
            .collect();
        if points.is_empty() {
            return Err(Error::InvalidEvent(format!("predicate {predicate:?} selects no point")));
        }
        Self::new(space, points)
    }

    /// The whole space as an event.
    pub fn full(space: &ProductSpace) -> Result<Self> {
        Self::new(space, space.enumerate_points()?.map(|(x, _)| x).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn contains(&self, space: &ProductSpace, x: &Point) -> bool {
        match &self.bits {
            Some(bits) if space.validate_point(x).is_ok() => {
                let idx = space.index_of(x) as usize;
                bits.get(idx / 64).is_some_and(|w| w >> (idx % 64) & 1 == 1)
            }
            _ => self.points.binary_search(x).is_ok(),
        }
    }
}
