//! Tail curves of the applications. Each takes the median (or a
//! scale) estimated by the simulator.

use crate::error::{Error, Result};

use super::{BoundQuery, BoundValue};

/// `8 exp(-u^2 / (16 N E X^2))` for `P(|B_N - M| >= 1 + u)`.
pub fn binpack_tail_bound(u: f64, n: usize, ex2: f64) -> f64 {
    8.0 * (-u * u / (16.0 * n as f64 * ex2)).exp()
}

/// Largest `u` covered by the bin packing deviation bound.
pub fn binpack_range(n: usize, ex2: f64) -> f64 {
    4.0 * 2f64.sqrt() * n as f64 * ex2
}

/// Upper tail of a configuration function: `c exp(-u^2 / (c' (M + u)))`.
fn upper(u: f64, m: f64, denom: f64) -> f64 {
    2.0 * (-u * u / (denom * (m + u))).exp()
}

fn lower(u: f64, m: f64, denom: f64) -> f64 {
    if m <= 0.0 {
        return 2.0;
    }
    2.0 * (-u * u / (denom * m)).exp()
}

/// `P(L_N >= M + u) <= 2 exp(-u^2 / (4(M + u)))`.
pub fn lis_upper_bound(u: f64, m: f64) -> f64 {
    upper(u, m, 4.0)
}

/// `P(L_N <= M - u) <= 2 exp(-u^2 / (4M))`.
pub fn lis_lower_bound(u: f64, m: f64) -> f64 {
    lower(u, m, 4.0)
}

/// Common-subsequence upper tail with constant 32.
pub fn lcs_upper_bound(u: f64, m: f64) -> f64 {
    upper(u, m, 32.0)
}

pub fn lcs_lower_bound(u: f64, m: f64) -> f64 {
    lower(u, m, 32.0)
}

/// `4 exp(-u^2 / (4 σ^2))` for the supremum of linear forms.
pub fn supsum_bound(u: f64, sigma: f64) -> f64 {
    4.0 * (-u * u / (4.0 * sigma * sigma)).exp()
}

/// `4 exp(-t^2 / (16 s))`, with `s = σ^2` or `s = Σ a_i^2` for the two
/// permutation variants.
pub fn permutation_bound(t: f64, s: f64) -> f64 {
    4.0 * (-t * t / (16.0 * s)).exp()
}

/// `4 exp(-min(u^2/r, u) / K)` for first-passage times.
pub fn fpp_bound(u: f64, r: f64, big_k: f64) -> f64 {
    4.0 * (-(u * u / r).min(u) / big_k).exp()
}

/// `2 exp(-t^2 / (32 (N - 1)))` for `log Z_N`.
pub fn spin_bound(t: f64, n: usize) -> f64 {
    2.0 * (-t * t / (32.0 * (n as f64 - 1.0))).exp()
}

/// Largest `t` covered by the spin glass deviation bound.
pub fn spin_range(n: usize) -> f64 {
    4.0 * (n as f64).sqrt() * (n as f64 - 1.0)
}

/// `1 / (q^{k+1} P(Z <= a)^q) + P(τ Σ_{i<=k} X*_i >= t)`.
pub fn prop_13_1_rhs(q: usize, k: usize, p_le_a: f64, top_k_tail: f64) -> f64 {
    let qf = q as f64;
    1.0 / (qf.powi(k as i32 + 1) * p_le_a.powi(q as i32)) + top_k_tail
}

pub(super) fn app_curve(equation: &str, q: &BoundQuery) -> Result<BoundValue> {
    let x = q.threshold()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold {x} must be >= 0")));
    }
    let positive = |name: &str, v: f64| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidArgument(format!("{name} = {v} must be > 0")))
        }
    };
    let out = match equation {
        "6.5" => {
            let n = q.req_n()?;
            let ex2 = positive("scale (E X^2)", q.req_scale()?)?;
            let range = binpack_range(n, ex2);
            BoundValue::new(equation, q, binpack_tail_bound(x, n, ex2))
                .note(x > range, format!("out of stated range: requires u <= {range}"))
        }
        "7.1.3" => BoundValue::new(equation, q, lis_upper_bound(x, q.req_median()?)),
        "7.1.4" => BoundValue::new(equation, q, lis_lower_bound(x, q.req_median()?)),
        "7.2.1" => BoundValue::new(equation, q, lcs_upper_bound(x, q.req_median()?)),
        "7.2.2" => BoundValue::new(equation, q, lcs_lower_bound(x, q.req_median()?)),
        "8.1.1" => {
            let sigma = positive("scale (sigma)", q.req_scale()?)?;
            BoundValue::new(equation, q, supsum_bound(x, sigma))
        }
        "8.3.1" => {
            let r = positive("scale (r)", q.req_scale()?)?;
            let big_k = positive("K", q.big_k.unwrap_or(1.0))?;
            BoundValue::new(equation, q, fpp_bound(x, r, big_k)).note(
                q.big_k.is_none(),
                "K is an unspecified universal constant, taken as 1",
            )
        }
        "8.3.2" => {
            let n = q.req_n()? as f64;
            let c = positive("K (C')", q.big_k.unwrap_or(1.0))?;
            BoundValue::new(equation, q, 5.0 * (-x * x / (c * n)).exp())
                .note(x > n / c, format!("outside stated range: requires u <= n/C' = {}", n / c))
                .note(q.big_k.is_none(), "C' is an unspecified constant, taken as 1")
        }
        "12.3" => {
            let n = q.req_n()? as f64;
            let beta = q.req_scale()?;
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::InvalidArgument(format!("beta = {beta} must be in [0, 1)")));
            }
            let big_k = positive("K", q.big_k.unwrap_or(1.0))?;
            let dev = big_k * (x + (big_k / (1.0 - beta * beta)).ln().max(0.0).sqrt()) * n.sqrt();
            BoundValue::new(equation, q, 2.0 * (-x * x).exp())
                .note(true, format!("bounds P(|log Z_N - beta^2 N/4| >= {dev})"))
                .note(x <= 0.0 || x >= n / big_k, "out of stated range: requires 0 < t < N/K")
                .note(q.big_k.is_none(), "K is an unspecified universal constant, taken as 1")
        }
        "12.5" => {
            let n = q.req_n()?;
            if n < 2 {
                return Err(Error::InvalidArgument("N must be >= 2".into()));
            }
            let range = spin_range(n);
            BoundValue::new(equation, q, spin_bound(x, n))
                .note(x <= 0.0 || x > range, format!("out of stated range: requires 0 < t <= {range}"))
        }
        "13.17" | "13.18" => {
            let s = positive("scale", q.req_scale()?)?;
            BoundValue::new(equation, q, permutation_bound(x, s))
        }
        other => return Err(Error::InvalidArgument(format!("unknown curve {other}"))),
    };
    Ok(out.tail())
}
