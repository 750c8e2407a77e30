//! Bounds on product spaces: exponential moments of the distance
//! functionals and the tail estimates they yield through Chebyshev's
//! inequality.

use std::f64::consts::E;

use crate::distances::PenaltyKernel;
use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_max};

use super::{BoundQuery, BoundValue};

fn check_nonneg(name: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be finite and >= 0")))
    }
}

fn check_prob_open(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} not in (0, 1)")))
    }
}

/// `a(t) = 1/2 + (e^t + e^-t)/4`.
pub fn a_of_t(t: f64) -> f64 {
    0.5 + 0.5 * t.cosh()
}

/// Closed form of `a(α, t)` for the `P(A)^-α` sharpening of the Hamming
/// moment bound.
pub fn a_alpha_t(alpha: f64, t: f64) -> f64 {
    if t < 1e-8 {
        // 0/0 at t = 0; the expansion starts 1 + t^2 (1 + 1/α) / 8
        return 1.0 + t * t * (1.0 + 1.0 / alpha) / 8.0;
    }
    let lead = (alpha * alpha.ln() - (alpha + 1.0) * (alpha + 1.0).ln()).exp();
    let em = (-t / alpha).exp();
    let num = ((t.exp() - em).ln() * (1.0 + alpha)).exp();
    let den = (1.0 - em) * (t.exp_m1().ln() * alpha).exp();
    lead * num / den
}

/// `b(α, t, p)` of the two-point space (weight `p` on symbol 1).
pub fn two_point_b(alpha: f64, t: f64, p: f64) -> f64 {
    let p = if p < 0.5 { 1.0 - p } else { p };
    ((1.0 - p) * t.exp() + p) * (p + (1.0 - p) * (-t / alpha).exp()).powf(alpha)
}

/// `a(α, t) = max(1, (1 - p + p e^t)(p1 e^{-t/α} + 1 - p1)^α)` of the
/// one-sided distance.
pub fn one_sided_a(alpha: f64, t: f64, p: f64, p1: f64) -> f64 {
    let v = (1.0 - p + p * t.exp()) * (p1 * (-t / alpha).exp() + 1.0 - p1).powf(alpha);
    v.max(1.0)
}

/// `p1 (1 - p) / (p (1 - p1))`, the dimension-free base.
pub fn one_sided_moment_base(p: f64, p1: f64) -> Result<f64> {
    check_prob_open("p", p)?;
    check_prob_open("p1", p1)?;
    if p >= p1 {
        return Err(Error::InvalidArgument(format!("need p < p1, got p = {p}, p1 = {p1}")));
    }
    Ok(p1 * (1.0 - p) / (p * (1.0 - p1)))
}

/// The root `x > 1` of `x + qα x^{-1/α} = 1 + qα`.
pub fn solve_a_q_alpha(q: usize, alpha: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q = {q} must be >= 2")));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 1")));
    }
    let qa = q as f64 * alpha;
    let f = |x: f64| x + qa * x.powf(-1.0 / alpha) - 1.0 - qa;
    let lo = 1.0 + 1e-9;
    let hi = 1.0 + qa;
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "no sign change on the bracket");
    Ok(bisect(f, lo, hi, 1e-15).expect("bracket has a sign change"))
}

/// `ξ(α, u) = α(1-u)log(1-u) - (α+1-αu) log((1+α-αu)/(1+α))`.
pub fn xi(alpha: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("u = {u} outside [0, 1]")));
    }
    Ok(xi_unchecked(alpha, u))
}

pub(crate) fn xi_unchecked(alpha: f64, u: f64) -> f64 {
    let v = 1.0 - u;
    let first = if v < 1e-15 { 0.0 } else { alpha * v * (-u).ln_1p() };
    let second = (alpha + 1.0 - alpha * u) * (-alpha * u / (1.0 + alpha)).ln_1p();
    first - second
}

/// `dξ/du = α log((1+α-αu)/((1+α)(1-u)))`, with `u` clamped to `1 - 1e-12`.
pub fn xi_derivative(alpha: f64, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0 - 1e-12);
    alpha * ((-alpha * u / (1.0 + alpha)).ln_1p() - (-u).ln_1p())
}

fn log_inv(p_a: f64) -> f64 {
    -p_a.ln()
}

/// Moment bound of the (weighted) Hamming distance: `a(t)^N / P(A)`, or
/// `exp(t^2 Σ a_i^2 / 4) / P(A)` when a profile is given.
pub fn hamming_moment(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    if let Some(profile) = &q.profile {
        let s2: f64 = profile.iter().map(|a| a * a).sum();
        return Ok(BoundValue::new("2.1.8", q, (t * t * s2 / 4.0).exp() / p_a));
    }
    let n = q.req_n()? as i32;
    Ok(BoundValue::new("2.1.2", q, a_of_t(t).powi(n) / p_a))
}

/// `P(f >= k) <= exp(-k^2/N) / P(A)`; weighted: `exp(-u^2/Σa_i^2) / P(A)`.
pub fn hamming_tail(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    if let Some(profile) = &q.profile {
        let u = check_nonneg("u", q.u.or(q.k).ok_or_else(|| {
            Error::InvalidArgument("missing parameter u".into())
        })?)?;
        let s2: f64 = profile.iter().map(|a| a * a).sum();
        if s2 <= 0.0 {
            return Err(Error::InvalidArgument("profile has no positive entry".into()));
        }
        return Ok(BoundValue::new("2.1.9", q, (-u * u / s2).exp() / p_a).tail());
    }
    let n = q.req_n()? as f64;
    let k = check_nonneg("k", q.req_k()?)?;
    Ok(BoundValue::new("2.1.3", q, (-k * k / n).exp() / p_a).tail())
}

/// `a(α, t)^N / P(A)^α` with the exact `a(α, t)`.
pub fn sharpened_moment_exact(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let alpha = q.alpha_or(1.0)?;
    let n = q.req_n()? as i32;
    Ok(BoundValue::new("2.2.1", q, a_alpha_t(alpha, t).powi(n) / p_a.powf(alpha)))
}

/// `P(A)^-α exp(N t^2 (1 + 1/α) / 8)`.
pub fn sharpened_moment(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let alpha = q.alpha_or(1.0)?;
    let n = q.req_n()? as f64;
    let v = (n * t * t * (1.0 + 1.0 / alpha) / 8.0).exp() / p_a.powf(alpha);
    Ok(BoundValue::new("2.2.6", q, v))
}

/// `exp(-(2/N)(k - sqrt((N/2) log(1/P(A))))^2)` and the optimal `α`.
pub fn sharpened_tail(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let n = q.req_n()? as f64;
    let k = check_nonneg("k", q.req_k()?)?;
    let l = log_inv(p_a);
    let threshold = (n / 2.0 * l).sqrt();
    let v = (-2.0 / n * (k - threshold).powi(2)).exp();
    let mut out = BoundValue::new("2.2.7", q, v).note(
        k < threshold,
        format!("out of stated range: requires k >= sqrt(N/2 log 1/pA) = {threshold}"),
    );
    if l > 0.0 {
        out.optimal_alpha = Some(-1.0 + (2.0 * k * k / (n * l)).sqrt());
    }
    Ok(out.tail())
}

fn two_point_params(q: &BoundQuery) -> Result<(f64, f64, f64, f64)> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let alpha = q.alpha_or(1.0)?;
    let p = check_prob_open("p", q.req_p()?)?;
    Ok((p_a, t, alpha, p))
}

/// `b(α, t, p)^N / P(A)^α`.
pub fn two_point_moment(q: &BoundQuery) -> Result<BoundValue> {
    let (p_a, t, alpha, p) = two_point_params(q)?;
    let n = q.req_n()? as i32;
    let v = two_point_b(alpha, t, p).powi(n) / p_a.powf(alpha);
    Ok(BoundValue::new("2.3.1", q, v))
}

/// `P(A)^-α exp N [p(1-p)(1+1/α) t^2/2 + K t^3]` for `t <= 1`.
pub fn two_point_moment_expansion(q: &BoundQuery) -> Result<BoundValue> {
    let (p_a, t, alpha, p) = two_point_params(q)?;
    let n = q.req_n()? as f64;
    let big_k = q.big_k.unwrap_or(0.0);
    let pq = p * (1.0 - p);
    let v = (n * (pq * (1.0 + 1.0 / alpha) * t * t / 2.0 + big_k * t.powi(3))).exp()
        / p_a.powf(alpha);
    Ok(BoundValue::new("2.3.4", q, v)
        .note(t > 1.0, "out of stated range: requires t <= 1")
        .note(q.big_k.is_none(), "K unspecified: cubic term omitted (K = 0)"))
}

/// Two-point tail with the cubic correction `K k^3 / ((p(1-p))^3 N^2)`.
pub fn two_point_tail(q: &BoundQuery) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let n = q.req_n()? as f64;
    let k = check_nonneg("k", q.req_k()?)?;
    let p = check_prob_open("p", q.req_p()?)?;
    let big_k = q.big_k.unwrap_or(0.0);
    let pq = p * (1.0 - p);
    let l = log_inv(p_a);
    let center = (2.0 * pq * n * l).sqrt();
    let exponent =
        -(k - center).powi(2) / (2.0 * pq * n) + big_k * k.powi(3) / (pq.powi(3) * n * n);
    let lo = (4.0 * pq * n * l).sqrt();
    let hi = pq * n;
    let mut out = BoundValue::new("2.3.5", q, exponent.exp())
        .note(
            k < lo || k > hi,
            format!("out of stated range: requires {lo} <= k <= {hi}"),
        )
        .note(q.big_k.is_none(), "K unspecified: leading term only (K = 0)");
    if l > 0.0 {
        out.optimal_alpha = Some(-1.0 + (k * k / (2.0 * pq * n * l)).sqrt());
    }
    Ok(out.tail())
}

/// `a(α, t)^N / P1(A)^α` for the one-sided distance; `pA` carries `P1(A)`.
pub fn one_sided_moment(q: &BoundQuery) -> Result<BoundValue> {
    let (p1_a, t, alpha, p) = two_point_params(q)?;
    let p1 = check_prob_open("p1", q.req_p1()?)?;
    one_sided_moment_base(p, p1)?;
    let n = q.req_n()? as i32;
    let v = one_sided_a(alpha, t, p, p1).powi(n) / p1_a.powf(alpha);
    Ok(BoundValue::new("2.3.6", q, v))
}

/// `∫ base^f dP <= 1 / P1(A)`; `pA` carries `P1(A)`.
pub fn one_sided_base_bound(q: &BoundQuery) -> Result<BoundValue> {
    let p1_a = q.req_p_a()?;
    let base = one_sided_moment_base(q.req_p()?, q.req_p1()?)?;
    Ok(BoundValue::new("2.3.7", q, 1.0 / p1_a).note(true, format!("base = {base}")))
}

/// `(1/2 ∬ (e^{tv} + e^{-tv}))^N / P(A)` with `v = max(h, h^T)`.
pub fn penalty_moment(q: &BoundQuery, kernel: &PenaltyKernel) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let n = q.req_n()? as i32;
    Ok(BoundValue::new("2.4.4", q, kernel.cosh_integral(t).powi(n) / p_a))
}

/// `exp(N t^2 ∬(e^h + e^-h - 2)) / P(A)` for `t <= 1`.
pub fn penalty_moment_quadratic(q: &BoundQuery, kernel: &PenaltyKernel) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let n = q.req_n()? as f64;
    let v = (n * t * t * kernel.excess_integral()).exp() / p_a;
    Ok(BoundValue::new("2.4.11", q, v).note(t > 1.0, "out of stated range: requires t <= 1"))
}

/// `e^{-u^2/4N} / P(A)`, valid when `∬ e^h <= 2` and `u <= 2N`.
pub fn penalty_tail(q: &BoundQuery, kernel: &PenaltyKernel) -> Result<BoundValue> {
    let integral = kernel.exp_integral(1.0);
    if integral > 2.0 + 1e-12 {
        return Err(Error::IntegrabilityFailed { integral });
    }
    let p_a = q.req_p_a()?;
    let u = check_nonneg("u", q.req_u()?)?;
    let n = q.req_n()? as f64;
    Ok(BoundValue::new("2.4.13", q, (-u * u / (4.0 * n)).exp() / p_a)
        .note(u > 2.0 * n, "out of stated range: requires u <= 2N")
        .tail())
}

/// Bernstein-type tail `exp(-min(u^2/(8N|h|_2^2), u/(2|h|_inf))) / P(A)`.
pub fn penalty_tail_bernstein(q: &BoundQuery, kernel: &PenaltyKernel) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let u = check_nonneg("u", q.req_u()?)?;
    let n = q.req_n()? as f64;
    let (n2, ninf) = (kernel.norm2(), kernel.norm_inf());
    let exponent = if ninf == 0.0 {
        f64::INFINITY
    } else {
        (u * u / (8.0 * n * n2 * n2)).min(u / (2.0 * ninf))
    };
    let v = if u == 0.0 { 1.0 / p_a } else { (-exponent).exp() / p_a };
    Ok(BoundValue::new("2.4.14", q, v).tail())
}

/// All penalty bounds computable from the query (moments need `t`, tails `u`).
pub fn penalty_bounds(q: &BoundQuery, kernel: &PenaltyKernel) -> Result<Vec<BoundValue>> {
    let mut out = Vec::new();
    if q.t.is_some() {
        out.push(penalty_moment(q, kernel)?);
        out.push(penalty_moment_quadratic(q, kernel)?);
    }
    if q.u.is_some() {
        out.push(penalty_tail(q, kernel)?);
        out.push(penalty_tail_bernstein(q, kernel)?);
    }
    Ok(out)
}

/// Right-hand side of the q-point moment bound for `q` copies of one set:
/// `P(A)^-q`, or `P(A)^{-qα}` for the base `a(q, α)`.
pub fn q_point_moment(q: &BoundQuery, sharpened: bool) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let qq = q.req_q()?;
    if qq < 2 {
        return Err(Error::InvalidArgument(format!("q = {qq} must be >= 2")));
    }
    if sharpened {
        let alpha = q.alpha_or(1.0)?;
        let base = solve_a_q_alpha(qq, alpha)?;
        let v = p_a.powf(-(qq as f64) * alpha);
        return Ok(BoundValue::new("3.2.1", q, v).note(true, format!("base a(q, alpha) = {base}")));
    }
    Ok(BoundValue::new("3.1.2", q, p_a.powi(-(qq as i32))).note(true, format!("base = {qq}")))
}

/// The three q-point tails: basic, α-optimised, and the large-`q` form.
pub fn q_point_tail(q: &BoundQuery) -> Result<Vec<BoundValue>> {
    let p_a = q.req_p_a()?;
    let qq = q.req_q()?;
    if qq < 2 {
        return Err(Error::InvalidArgument(format!("q = {qq} must be >= 2")));
    }
    let k = check_nonneg("k", q.req_k()?)?;
    let qf = qq as f64;
    let l = log_inv(p_a);

    let basic = BoundValue::new("3.1.3", q, (-k * qf.ln() + qf * l).exp()).tail();

    // log of a(q, α)^-k P(A)^{-qα}, minimised over a geometric grid in α
    // and refined by golden section in log α
    let objective = |alpha: f64| -> f64 {
        let a = solve_a_q_alpha(qq, alpha).expect("alpha >= 1");
        -k * a.ln() + qf * alpha * l
    };
    let grid: Vec<f64> = (0..=80).map(|j| 2f64.powf(j as f64 / 8.0)).collect();
    let (best_j, _) = grid
        .iter()
        .map(|&a| objective(a))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
    let lo = grid[best_j.saturating_sub(1)].ln();
    let hi = grid[(best_j + 1).min(80)].ln();
    let (la, neg) = golden_max(|la| -objective(la.exp()), lo, hi, 1e-10);
    let (alpha_opt, log_value) = if -neg <= objective(grid[best_j]) {
        (la.exp(), -neg)
    } else {
        (grid[best_j], objective(grid[best_j]))
    };
    let mut sharp = BoundValue::new("3.2.3", q, log_value.exp()).tail();
    sharp.optimal_alpha = Some(alpha_opt);

    let q0 = q.q0.unwrap_or(64.0);
    let large = (k * (E / ((E - 1.0) * qf * qf.ln())).ln() + qf * qf.ln() * l).exp();
    let large = BoundValue::new("3.2.4", q, large)
        .note(
            true,
            format!("valid for q >= q0; q0 is an unspecified universal constant, taken as {q0}"),
        )
        .note(qf < q0, "out of stated range: q < q0")
        .tail();
    Ok(vec![basic, sharp, large])
}

/// Variants of the convex-distance tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexVariant {
    Basic,
    Alpha,
    Optimized,
    TwoPointUniform,
    TwoPointUniformOptimized,
}

/// `P(f_c >= t)` bounds.
pub fn convex_tail(q: &BoundQuery, variant: ConvexVariant) -> Result<BoundValue> {
    let p_a = q.req_p_a()?;
    let t = check_nonneg("t", q.req_t()?)?;
    let l = log_inv(p_a);
    let out = match variant {
        ConvexVariant::Basic => BoundValue::new("4.1.3", q, (-t * t / 4.0).exp() / p_a),
        ConvexVariant::Alpha => {
            let a = q.alpha_or(1.0)?;
            let v = (a * l - a * t * t / (2.0 * (a + 1.0))).exp();
            BoundValue::new("4.2.6", q, v)
        }
        ConvexVariant::TwoPointUniform => {
            let a = q.alpha_or(1.0)?;
            let v = (a * l - a * t * t / (a + 1.0)).exp();
            BoundValue::new("4.3.7", q, v)
        }
        ConvexVariant::Optimized => {
            let th = (2.0 * l).sqrt();
            let mut b = BoundValue::new("4.2.7", q, (-0.5 * (t - th).powi(2)).exp()).note(
                t < th,
                format!("out of stated range: requires t >= sqrt(2 log 1/pA) = {th}"),
            );
            if l > 0.0 {
                b.optimal_alpha = Some(t / th - 1.0);
            }
            b
        }
        ConvexVariant::TwoPointUniformOptimized => {
            let th = l.sqrt();
            let mut b = BoundValue::new("4.3.8", q, (-(t - th).powi(2)).exp()).note(
                t < th,
                format!("out of stated range: requires t >= sqrt(log 1/pA) = {th}"),
            );
            if l > 0.0 {
                b.optimal_alpha = Some(t / th - 1.0);
            }
            b
        }
    };
    Ok(out.tail())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::grid_golden_max;
    use crate::spaces::FiniteSpace;
    use proptest::prelude::*;

    fn query() -> BoundQuery {
        BoundQuery::default()
    }

    #[test]
    fn a_of_t_values() {
        assert_eq!(a_of_t(0.0), 1.0);
        // 0.5 + (e + 1/e)/4 to 30 digits
        assert!((a_of_t(1.0) - 1.271_540_317_407_621_9).abs() < 1e-15);
        let mut t = 0.0;
        while t <= 10.0 {
            assert!(a_of_t(t) <= (t * t / 4.0).exp() * (1.0 + 1e-15), "t = {t}");
            t += 1e-3;
        }
    }

    #[test]
    fn hamming_tail_example() {
        let q = BoundQuery {
            n: Some(100),
            p_a: Some(0.5),
            k: Some(20.0),
            ..query()
        };
        let v = hamming_tail(&q).unwrap();
        assert_eq!(v.equation, "2.1.3");
        assert!((v.value - 0.036_631_277_777_468_36).abs() < 1e-15);
        assert!(v.notes.is_empty());

        let zero = hamming_tail(&BoundQuery { k: Some(0.0), ..q.clone() }).unwrap();
        assert_eq!(zero.value, 2.0);
        assert!(zero.is_vacuous() && !zero.notes.is_empty());

        let weighted = BoundQuery {
            profile: Some(vec![2.0; 100]),
            u: Some(40.0),
            k: None,
            ..q.clone()
        };
        let w = hamming_tail(&weighted).unwrap();
        assert_eq!(w.equation, "2.1.9");
        assert!((w.value - v.value).abs() < 1e-15);
    }

    #[test]
    fn sharpened_tail_example() {
        let q = BoundQuery {
            n: Some(100),
            p_a: Some(0.5),
            k: Some(20.0),
            ..query()
        };
        let v = sharpened_tail(&q).unwrap();
        // high-precision evaluation of the closed form
        assert!((v.value - 0.018_620_221_889_068_94).abs() < 1e-14, "{}", v.value);
        assert!((v.optimal_alpha.unwrap() - 2.397_287_201_152_076).abs() < 1e-12);
        let th = (50.0 * 2f64.ln()).sqrt();
        let edge = sharpened_tail(&BoundQuery { k: Some(th), ..q.clone() }).unwrap();
        assert!((edge.value - 1.0).abs() < 1e-15);
        let below = sharpened_tail(&BoundQuery { k: Some(1.0), ..q }).unwrap();
        assert!(below.notes.iter().any(|n| n.contains("out of stated range")));
    }

    #[test]
    fn a_alpha_t_matches_variational_form_and_a_of_t() {
        for &alpha in &[1.0, 1.5, 2.0, 5.0] {
            for &t in &[0.05, 0.3, 1.0, 2.5] {
                let em = (-t / alpha as f64).exp();
                let oracle = grid_golden_max(
                    |u| (1.0 + u * (t.exp() - 1.0)) * (1.0 - u * (1.0 - em)).powf(alpha),
                    0.0,
                    1.0,
                    1000,
                );
                let v = a_alpha_t(alpha, t);
                assert!((v - oracle).abs() < 1e-9 * oracle, "alpha {alpha} t {t}: {v} vs {oracle}");
            }
        }
        for i in 0..=30 {
            let t = i as f64 * 0.1;
            assert!((a_alpha_t(1.0, t) - a_of_t(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_point_b_identities() {
        for &alpha in &[1.0, 2.0, 3.5] {
            for &p in &[0.1, 0.3, 0.5, 0.8] {
                assert_eq!(two_point_b(alpha, 0.0, p), 1.0);
                for &t in &[0.2, 1.0, 3.0] {
                    let b = two_point_b(alpha, t, p);
                    assert!((b - two_point_b(alpha, t, 1.0 - p)).abs() < 1e-15);
                }
            }
        }
        assert!((two_point_b(1.0, 1.0, 0.5) - 1.271_540_317_407_621_9).abs() < 1e-12);
        for i in 0..=300 {
            let t = i as f64 * 0.01;
            assert!((two_point_b(1.0, t, 0.5) - a_of_t(t)).abs() < 1e-12);
        }
    }

    /// `b` is the largest value of `φ(x) = ((1-p)x^α + p)((1-p)/x + p)^α`
    /// over `x ∈ [e^{-t/α}, e^{t/α}]`.
    #[test]
    fn two_point_b_is_sup_of_phi() {
        for &alpha in &[1.0, 2.0, 4.0] {
            for &p in &[0.2, 0.3, 0.5, 0.7, 0.9] {
                for &t in &[0.1, 0.5, 1.0, 2.0] {
                    let phi = |lx: f64| {
                        let x = lx.exp();
                        ((1.0 - p) * x.powf(alpha) + p) * ((1.0 - p) / x + p).powf(alpha)
                    };
                    let oracle = grid_golden_max(phi, -t / alpha, t / alpha, 2000);
                    let b = two_point_b(alpha, t, p);
                    assert!((b - oracle).abs() <= 1e-9 * oracle, "{alpha} {p} {t}: {b} vs {oracle}");
                }
            }
        }
    }

    #[test]
    fn two_point_tail_reduces_at_half() {
        let q = BoundQuery {
            n: Some(100),
            p_a: Some(0.5),
            k: Some(20.0),
            p: Some(0.5),
            ..query()
        };
        let v = two_point_tail(&q).unwrap();
        let s = sharpened_tail(&q).unwrap();
        assert!((v.value - s.value).abs() < 1e-15);
        assert!(v.notes.iter().any(|n| n.contains("K unspecified")));
        let center = (2.0 * 0.25 * 100.0 * 2f64.ln()).sqrt();
        let at = two_point_tail(&BoundQuery { k: Some(center), ..q.clone() }).unwrap();
        assert!((at.value - 1.0).abs() < 1e-15);
        let lo = (4.0 * 0.25 * 100.0 * 2f64.ln()).sqrt();
        let edge = two_point_tail(&BoundQuery { k: Some(lo), p: Some(0.3), ..q }).unwrap();
        assert!(edge.value <= 1.0);
    }

    #[test]
    fn one_sided_base_examples() {
        assert!((one_sided_moment_base(0.3, 0.5).unwrap() - 7.0 / 3.0).abs() < 1e-15);
        assert!((one_sided_moment_base(0.2, 0.8).unwrap() - 16.0).abs() < 1e-13);
        assert!((one_sided_moment_base(0.3, 0.3 + 1e-9).unwrap() - 1.0).abs() < 1e-6);
        assert!(one_sided_moment_base(0.5, 0.3).is_err());
        assert!(one_sided_moment_base(0.5, 0.5).is_err());
        // at α = 1 and e^t = base, a(α, t) = 1
        let t = (7.0f64 / 3.0).ln();
        assert!((one_sided_a(1.0, t, 0.3, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_a_q_alpha_examples() {
        for q in 2..=10 {
            let a = solve_a_q_alpha(q, 1.0).unwrap();
            assert!((a - q as f64).abs() < 1e-10 * q as f64, "q {q}: {a}");
        }
        let a = solve_a_q_alpha(10, 10f64.ln()).unwrap();
        assert!(a >= 1.0 + (1.0 - (-1f64).exp()) * 10.0 * 10f64.ln() - 1e-9);
        for q in [2usize, 3, 7, 50] {
            for alpha in [1.0, 1.7, 3.0, 20.0] {
                let x = solve_a_q_alpha(q, alpha).unwrap();
                let qa = q as f64 * alpha;
                let r = x + qa * x.powf(-1.0 / alpha) - 1.0 - qa;
                assert!(x > 1.0 && r.abs() <= 1e-10 * (1.0 + qa), "{q} {alpha}: {r}");
            }
        }
        assert!(solve_a_q_alpha(1, 1.0).is_err());
        assert!(solve_a_q_alpha(2, 0.5).is_err());
    }

    #[test]
    fn xi_values_and_shape() {
        for alpha in [1.0, 2.0, 5.0] {
            assert_eq!(xi(alpha, 0.0).unwrap(), 0.0);
            assert!((xi(alpha, 1.0).unwrap() - (1.0 + alpha).ln()).abs() < 1e-14);
            let vals: Vec<f64> = (0..=1000).map(|i| xi(alpha, i as f64 / 1000.0).unwrap()).collect();
            for (i, v) in vals.iter().enumerate() {
                let u = i as f64 / 1000.0;
                assert!(*v >= alpha * u * u / (2.0 * (alpha + 1.0)) - 1e-15);
            }
            for w in vals.windows(2) {
                assert!(w[1] >= w[0]);
            }
            for w in vals.windows(3) {
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-14);
            }
        }
        assert!((xi(2.0, 0.5).unwrap() - 0.117_783_035_656_383_45).abs() < 1e-15);
        assert!(xi(1.0, 1.5).is_err());
        assert!(xi(1.0, -0.1).is_err());
    }

    #[test]
    fn xi_derivative_matches_finite_difference() {
        for alpha in [1.0, 2.0, 5.0] {
            for u in [0.0, 0.1, 0.5, 0.9] {
                let h = 1e-6;
                let fd = (xi_unchecked(alpha, u + h) - xi_unchecked(alpha, (u - h).max(0.0)))
                    / (u + h - (u - h).max(0.0));
                assert!((xi_derivative(alpha, u) - fd).abs() < 1e-5, "{alpha} {u}");
            }
            assert!(xi_derivative(alpha, 1.0).is_finite());
        }
    }

    #[test]
    fn q_point_tail_examples() {
        let q = BoundQuery {
            q: Some(2),
            k: Some(3.0),
            p_a: Some(0.5),
            ..query()
        };
        let v = q_point_tail(&q).unwrap();
        assert_eq!(v[0].equation, "3.1.3");
        assert!((v[0].value - 0.5).abs() < 1e-15);
        assert!(v[1].value <= v[0].value * (1.0 + 1e-12));
        assert!(v[2].notes.iter().any(|n| n.contains("q0")));
        let k0 = q_point_tail(&BoundQuery { k: Some(0.0), ..q }).unwrap();
        assert!((k0[0].value - 4.0).abs() < 1e-15 && k0[0].is_vacuous());
    }

    /// The α-optimised value is no larger than a dense scan of the objective.
    #[test]
    fn q_point_sharpened_against_dense_scan() {
        for (qq, k, p_a) in [(2usize, 10.0, 0.5), (3, 25.0, 0.2), (5, 40.0, 0.9)] {
            let q = BoundQuery {
                q: Some(qq),
                k: Some(k),
                p_a: Some(p_a),
                ..query()
            };
            let v = &q_point_tail(&q).unwrap()[1];
            let dense = (0..=20000)
                .map(|i| 1.0 + i as f64 * 0.005)
                .map(|a| solve_a_q_alpha(qq, a).unwrap().powf(-k) * p_a.powf(-(qq as f64) * a))
                .fold(f64::INFINITY, f64::min);
            assert!(v.value <= dense * (1.0 + 1e-9), "{qq}: {} vs {dense}", v.value);
        }
    }

    #[test]
    fn convex_tail_examples() {
        let q = BoundQuery {
            p_a: Some(0.5),
            t: Some(4.0),
            ..query()
        };
        let v = convex_tail(&q, ConvexVariant::Basic).unwrap();
        assert!((v.value - 2.0 * (-4f64).exp()).abs() < 1e-15);
        let big = BoundQuery { alpha: Some(1e6), p_a: Some(1.0), ..q.clone() };
        let a = convex_tail(&big, ConvexVariant::Alpha).unwrap();
        assert!((-a.value.ln() - 8.0).abs() < 1e-5 * 8.0);
        let th = (2.0 * 2f64.ln()).sqrt();
        let o = convex_tail(&BoundQuery { t: Some(th), ..q.clone() }, ConvexVariant::Optimized)
            .unwrap();
        assert!((o.value - 1.0).abs() < 1e-15);
        let th2 = 2f64.ln().sqrt();
        let o2 = convex_tail(
            &BoundQuery { t: Some(th2), ..q },
            ConvexVariant::TwoPointUniformOptimized,
        )
        .unwrap();
        assert!((o2.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn penalty_bound_examples() {
        let mu = FiniteSpace::uniform(2).unwrap();
        let zero = PenaltyKernel::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], &mu).unwrap();
        let q = BoundQuery {
            n: Some(5),
            p_a: Some(0.25),
            t: Some(0.7),
            u: Some(0.0),
            ..query()
        };
        assert!((penalty_moment(&q, &zero).unwrap().value - 4.0).abs() < 1e-15);
        let one = PenaltyKernel::zero_one(&mu, 1.0).unwrap();
        // (1/2)(1 + e) <= 2 exactly when c <= log 3
        assert!((one.exp_integral(1.0) - 0.5 * (1.0 + 1f64.exp())).abs() < 1e-15);
        assert!((penalty_tail(&q, &one).unwrap().value - 4.0).abs() < 1e-15);
        let two = PenaltyKernel::zero_one(&mu, 1.2).unwrap();
        assert!(matches!(
            penalty_tail(&q, &two),
            Err(Error::IntegrabilityFailed { .. })
        ));
        assert_eq!(penalty_bounds(&q, &one).unwrap().len(), 4);
    }

    proptest! {
        #[test]
        fn tails_nonincreasing_in_threshold(
            n in 1usize..200, p_a in 0.01f64..1.0, x in 0.0f64..30.0, dx in 0.0f64..5.0,
            alpha in 1.0f64..8.0, p in 0.05f64..0.95,
        ) {
            let at = |v: f64| BoundQuery {
                n: Some(n), p_a: Some(p_a), k: Some(v), t: Some(v), u: Some(v),
                alpha: Some(alpha), p: Some(p), q: Some(3), ..Default::default()
            };
            let (a, b) = (at(x), at(x + dx));
            prop_assert!(hamming_tail(&b).unwrap().value <= hamming_tail(&a).unwrap().value);
            for var in [ConvexVariant::Basic, ConvexVariant::Alpha, ConvexVariant::TwoPointUniform] {
                prop_assert!(convex_tail(&b, var).unwrap().value <= convex_tail(&a, var).unwrap().value);
            }
            let l = -p_a.ln();
            // tails with a validity threshold, compared inside their range
            let th = (n as f64 / 2.0 * l).sqrt();
            if x >= th {
                prop_assert!(sharpened_tail(&b).unwrap().value <= sharpened_tail(&a).unwrap().value);
            }
            let th = (2.0 * l).sqrt();
            if x >= th {
                prop_assert!(convex_tail(&b, ConvexVariant::Optimized).unwrap().value
                    <= convex_tail(&a, ConvexVariant::Optimized).unwrap().value);
            }
            let qa = q_point_tail(&a).unwrap();
            let qb = q_point_tail(&b).unwrap();
            for (va, vb) in qa.iter().zip(&qb) {
                prop_assert!(vb.value <= va.value * (1.0 + 1e-9));
            }
        }
    }
}
