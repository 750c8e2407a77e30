//! Closed-form concentration bounds.
//!
//! Every bound is addressed by a stable string id (`"2.1.3"`, `"4.2.7"`, ...)
//! which is the contract shared by the CLI, the verification sweeps and the
//! report files. Thresholds outside a bound's stated range never raise; the
//! value is still computed and a note is attached.

mod apps;
mod product;

pub use apps::*;
pub use product::*;

use serde::{Deserialize, Serialize};

use crate::distances::PenaltyKernel;
use crate::error::{Error, Result};

/// Parameters of a bound evaluation. Unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundQuery {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "pA", default, skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<f64>>,
    /// Unspecified universal constant of 2.3.5, 8.3.1 and 12.3.
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub big_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    /// Median (or its estimate) for the application curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    /// Scale parameter of the application curves (sigma, E X^2, r) by id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

macro_rules! getter {
    ($name:ident, $field:ident, $ty:ty, $label:literal) => {
        pub fn $name(&self) -> Result<$ty> {
            self.$field
                .clone()
                .ok_or_else(|| Error::InvalidArgument(format!("missing parameter {}", $label)))
        }
    };
}

impl BoundQuery {
    getter!(req_n, n, usize, "N");
    getter!(req_t, t, f64, "t");
    getter!(req_k, k, f64, "k");
    getter!(req_u, u, f64, "u");
    getter!(req_q, q, usize, "q");
    getter!(req_p, p, f64, "p");
    getter!(req_p1, p1, f64, "p1");
    getter!(req_profile, profile, Vec<f64>, "profile");
    getter!(req_median, median, f64, "median");
    getter!(req_scale, scale, f64, "scale");

    pub fn req_p_a(&self) -> Result<f64> {
        let p = self
            .p_a
            .ok_or_else(|| Error::InvalidArgument("missing parameter pA".into()))?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!("pA = {p} not in (0, 1]")));
        }
        Ok(p)
    }

    pub fn alpha_or(&self, default: f64) -> Result<f64> {
        let a = self.alpha.unwrap_or(default);
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha = {a} must be >= 1")));
        }
        Ok(a)
    }

    /// `k`, falling back to `u` (the CLI accepts either for thresholds).
    pub fn threshold(&self) -> Result<f64> {
        self.k
            .or(self.u)
            .or(self.t)
            .ok_or_else(|| Error::InvalidArgument("missing threshold (k, u or t)".into()))
    }
}

/// A named bound value with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub equation: String,
    pub params: BoundQuery,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_alpha: Option<f64>,
}

impl BoundValue {
    pub fn new(equation: &str, params: &BoundQuery, value: f64) -> Self {
        Self {
            equation: equation.to_string(),
            params: params.clone(),
            value,
            notes: Vec::new(),
            optimal_alpha: None,
        }
    }

    pub fn note(mut self, cond: bool, text: impl Into<String>) -> Self {
        if cond {
            self.notes.push(text.into());
        }
        self
    }

    /// Flags a tail bound that carries no information.
    pub fn tail(self) -> Self {
        let vacuous = self.value >= 1.0;
        self.note(vacuous, "vacuous: value >= 1")
    }

    pub fn is_vacuous(&self) -> bool {
        self.value >= 1.0
    }
}

/// Ids understood by [`evaluate`].
pub const EQUATIONS: &[&str] = &[
    "2.1.2", "2.1.3", "2.1.8", "2.1.9", "2.2.1", "2.2.6", "2.2.7", "2.3.1", "2.3.4", "2.3.5",
    "2.3.6", "2.3.7", "2.4.4", "2.4.11", "2.4.13", "2.4.14", "3.1.2", "3.1.3", "3.2.1", "3.2.2",
    "3.2.3", "3.2.4", "4.1.2", "4.1.3", "4.2.1", "4.2.5", "4.2.6", "4.2.7", "4.3.7", "4.3.8",
    "5.2", "6.5", "7.1.3", "7.1.4", "7.2.1", "7.2.2", "8.1.1", "8.3.1", "8.3.2", "12.3", "12.5",
    "13.17", "13.18",
];

/// Evaluates the bound with the given id. Penalty bounds need `kernel`.
pub fn evaluate(
    equation: &str,
    q: &BoundQuery,
    kernel: Option<&PenaltyKernel>,
) -> Result<BoundValue> {
    let need_kernel = || {
        kernel.ok_or_else(|| Error::InvalidArgument(format!("{equation} needs a penalty kernel")))
    };
    match equation {
        "2.1.2" | "2.1.3" => {
            let q = BoundQuery {
                profile: None,
                ..q.clone()
            };
            if equation == "2.1.2" {
                hamming_moment(&q)
            } else {
                hamming_tail(&q)
            }
        }
        "2.1.8" | "2.1.9" => {
            let mut q = q.clone();
            q.profile = Some(q.req_profile()?);
            if equation == "2.1.8" {
                hamming_moment(&q)
            } else {
                hamming_tail(&q)
            }
        }
        "2.2.1" => sharpened_moment_exact(q),
        "2.2.6" => sharpened_moment(q),
        "2.2.7" => sharpened_tail(q),
        "2.3.1" => two_point_moment(q),
        "2.3.4" => two_point_moment_expansion(q),
        "2.3.5" => two_point_tail(q),
        "2.3.6" => one_sided_moment(q),
        "2.3.7" => one_sided_base_bound(q),
        "2.4.4" | "2.4.11" | "2.4.13" | "2.4.14" => {
            let mut v = penalty_bounds(q, need_kernel()?)?;
            v.retain(|b| b.equation == equation);
            v.pop()
                .ok_or_else(|| Error::InvalidArgument(format!("{equation}: missing parameters")))
        }
        "3.1.2" | "3.2.1" => q_point_moment(q, equation == "3.2.1"),
        "3.1.3" | "3.2.3" | "3.2.4" => {
            let mut v = q_point_tail(q)?;
            v.retain(|b| b.equation == equation);
            Ok(v.pop().expect("q_point_tail returns all three variants"))
        }
        "3.2.2" => {
            let qq = q.req_q()?;
            let alpha = q.alpha_or(1.0)?;
            Ok(BoundValue::new(equation, q, solve_a_q_alpha(qq, alpha)?))
        }
        "4.1.2" | "5.2" => Ok(BoundValue::new(equation, q, 1.0 / q.req_p_a()?)),
        "4.2.5" => {
            let alpha = q.alpha_or(1.0)?;
            Ok(BoundValue::new(equation, q, q.req_p_a()?.powf(-alpha)))
        }
        "4.2.1" => {
            let alpha = q.alpha_or(1.0)?;
            Ok(BoundValue::new(equation, q, xi(alpha, q.req_u()?)?))
        }
        "4.1.3" => convex_tail(q, ConvexVariant::Basic),
        "4.2.6" => convex_tail(q, ConvexVariant::Alpha),
        "4.2.7" => convex_tail(q, ConvexVariant::Optimized),
        "4.3.7" => convex_tail(q, ConvexVariant::TwoPointUniform),
        "4.3.8" => convex_tail(q, ConvexVariant::TwoPointUniformOptimized),
        "6.5" | "7.1.3" | "7.1.4" | "7.2.1" | "7.2.2" | "8.1.1" | "8.3.1" | "8.3.2" | "12.3"
        | "12.5" | "13.17" | "13.18" => app_curve(equation, q),
        other => Err(Error::InvalidArgument(format!("unknown equation id {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_id_dispatches() {
        let q = BoundQuery {
            n: Some(10),
            p_a: Some(0.5),
            t: Some(0.5),
            k: Some(3.0),
            u: Some(0.5),
            alpha: Some(2.0),
            q: Some(2),
            p: Some(0.3),
            p1: Some(0.5),
            profile: Some(vec![1.0; 10]),
            median: Some(5.0),
            scale: Some(0.5),
            ..Default::default()
        };
        let kernel = PenaltyKernel::zero_one(&crate::spaces::FiniteSpace::uniform(3).unwrap(), 0.5)
            .unwrap();
        for id in EQUATIONS {
            let v = evaluate(id, &q, Some(&kernel)).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(v.equation, *id);
            assert!(v.value.is_finite() && v.value >= 0.0, "{id}: {}", v.value);
        }
        assert!(evaluate("9.9.9", &q, None).is_err());
    }

    #[test]
    fn missing_parameter_is_named() {
        let err = evaluate("2.1.3", &BoundQuery::default(), None).unwrap_err();
        assert!(err.to_string().contains("pA") || err.to_string().contains("N"));
    }
}
