//! Checking the inequalities: exact integrals by enumeration, sweeps over
//! families of events, and Monte Carlo tails with exact binomial intervals.

pub mod mc;
pub mod report;
mod sweep;

pub use mc::*;
pub use sweep::*;

use serde::{Deserialize, Serialize};

use crate::distances::{
    convex_distance, hamming_distance, one_sided_distance, penalty_distance, q_point_distance,
    xi_distance_result, PenaltyKernel, WeightProfile,
};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::spaces::{Event, Point, ProductSpace};

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Descriptive run with no pass/fail criterion.
    Report,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self != Verdict::Fail
    }
}

/// Distance functional integrated by [`exact_exp_moment`]. The integrand is
/// `exp(t g)` where `g` is the distance, `f_c^2` for `Convex`, or `f_α`
/// for `Xi`.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    Hamming { profile: Option<WeightProfile> },
    OneSided,
    Penalty(PenaltyKernel),
    Convex,
    Xi { alpha: f64 },
}

/// `g(x)` for every point of the space, with the mass of `x` and the
/// solver gap (0 for the combinatorial distances).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub entries: Vec<(f64, f64)>,
    pub max_gap: f64,
}

impl DistanceProfile {
    /// `Σ_x P({x}) exp(t g(x))`.
    pub fn exp_moment(&self, t: f64) -> f64 {
        let mut s = KahanSum::new();
        for &(m, g) in &self.entries {
            s.add(m * (t * g).exp());
        }
        s.value()
    }

    /// `P(g >= u)`. Values within rounding of `u` count as exceedances.
    pub fn tail(&self, u: f64) -> f64 {
        let cut = u - 1e-12 * u.abs().max(1.0);
        let mut s = KahanSum::new();
        for &(m, g) in &self.entries {
            if g >= cut {
                s.add(m);
            }
        }
        s.value()
    }
}

fn at_point(x: &Point, e: Error) -> Error {
    Error::AtPoint {
        point: x.0.clone(),
        source: Box::new(e),
    }
}

/// Evaluates `g` at every point of an enumerable space.
pub fn distance_profile(
    space: &ProductSpace,
    a: &Event,
    functional: &Functional,
) -> Result<DistanceProfile> {
    if a.is_empty() {
        return Err(Error::InvalidEvent("event is empty".into()));
    }
    let mut entries = Vec::with_capacity(space.point_count().min(1 << 24) as usize);
    let mut max_gap = 0.0f64;
    for (x, m) in space.enumerate_points()? {
        let g = match functional {
            Functional::Hamming { profile } => hamming_distance(space, a, &x, profile.as_ref()),
            Functional::OneSided => one_sided_distance(space, a, &x).map(|v| v as f64),
            Functional::Penalty(k) => penalty_distance(space, a, &x, k),
            Functional::Convex => convex_distance(space, a, &x).map(|r| {
                max_gap = max_gap.max(r.gap);
                r.value
            }),
            Functional::Xi { alpha } => xi_distance_result(space, a, &x, *alpha).map(|r| {
                max_gap = max_gap.max(r.gap);
                r.value
            }),
        }
        .map_err(|e| at_point(&x, e))?;
        entries.push((m, g));
    }
    Ok(DistanceProfile { entries, max_gap })
}

/// `∫ exp(t g(A, x)) dP(x)` by enumeration.
pub fn exact_exp_moment(
    space: &ProductSpace,
    a: &Event,
    functional: &Functional,
    t: f64,
) -> Result<f64> {
    Ok(distance_profile(space, a, functional)?.exp_moment(t))
}

/// q-point distance of every point to the tuple `sets`.
pub fn q_point_profile(space: &ProductSpace, sets: &[&Event]) -> Result<DistanceProfile> {
    let mut entries = Vec::new();
    for (x, m) in space.enumerate_points()? {
        let f = q_point_distance(space, sets, &x).map_err(|e| at_point(&x, e))?;
        entries.push((m, f as f64));
    }
    Ok(DistanceProfile {
        entries,
        max_gap: 0.0,
    })
}

/// `∫ base^{f(A_1, ..., A_q; x)} dP(x)`.
pub fn exact_q_point_moment(space: &ProductSpace, sets: &[&Event], base: f64) -> Result<f64> {
    if !(base > 0.0 && base.is_finite()) {
        return Err(Error::InvalidArgument(format!("base {base} must be > 0")));
    }
    Ok(q_point_profile(space, sets)?.exp_moment(base.ln()))
}
