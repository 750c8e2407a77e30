//! Small numerical helpers shared across modules: compensated summation,
//! bracketed root finding, unimodal maximisation and binomial/beta tails.

use statrs::function::beta::beta_reg;

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Bisection for a root of `f` on `[lo, hi]`, assuming a sign change.
/// Stops when the bracket is below `rel_tol * max(1, |mid|)`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(1.0) {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximum of `f` on `[lo, hi]`: dense grid scan followed by golden-section
/// refinement around the best grid cell. Endpoints are always evaluated.
pub fn grid_golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> f64 {
    let cells = cells.max(2);
    let step = (hi - lo) / cells as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=cells {
        let x = if i == cells { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = (lo + step * best_i.saturating_sub(1) as f64).max(lo);
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (_, refined) = golden_max(&f, a, b, 1e-13 * (1.0 + hi.abs()));
    best.max(refined)
}

/// `P(Bin(n, p) <= k)`.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    beta_reg((n - k) as f64, (k + 1) as f64, 1.0 - p)
}

/// Quantile of the Beta(a, b) distribution by bisection on the regularised
/// incomplete beta function. Deterministic to the last bit on IEEE hardware.
pub fn beta_quantile(prob: f64, a: f64, b: f64) -> f64 {
    if prob <= 0.0 {
        return 0.0;
    }
    if prob >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Two-sided Clopper–Pearson interval at confidence `1 - alpha` for `k`
/// successes out of `n` trials. Returns `(lower, upper)`.
pub fn clopper_pearson(k: u64, n: u64, alpha: f64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "clopper_pearson requires 0 <= k <= n, n > 0");
    let half = alpha / 2.0;
    let lower = if k == 0 {
        0.0
    } else {
        beta_quantile(half, k as f64, (n - k + 1) as f64)
    };
    let upper = if k == n {
        1.0
    } else {
        beta_quantile(1.0 - half, (k + 1) as f64, (n - k) as f64)
    };
    (lower, upper)
}

/// Coefficient of determination of a least-squares quadratic fit.
pub fn quadratic_fit_r2(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return None;
    }
    // normal equations for y = c0 + c1 x + c2 x^2
    let mut m = [[0.0f64; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let basis = [1.0, x, x * x];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * y;
        }
    }
    let coef = solve3(m)?;
    let mean = ys.iter().sum::<f64>() / n as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let fit = coef[0] + coef[1] * x + coef[2] * x * x;
        ss_res += (y - fit).powi(2);
        ss_tot += (y - mean).powi(2);
    }
    if ss_tot == 0.0 {
        return Some(1.0);
    }
    Some(1.0 - ss_res / ss_tot)
}

fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        let s = kahan_sum(v);
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn clopper_pearson_zero_count_closed_form() {
        let n = 100_000;
        let (lo, hi) = clopper_pearson(0, n, 0.01);
        assert_eq!(lo, 0.0);
        let expected = 1.0 - 0.005f64.powf(1.0 / n as f64);
        assert!((hi - expected).abs() < 1e-12, "{hi} vs {expected}");
        assert!((hi * n as f64 - 5.298).abs() < 1e-2);
    }

    #[test]
    fn clopper_pearson_full_count_closed_form() {
        let (lo, hi) = clopper_pearson(50, 50, 0.01);
        assert_eq!(hi, 1.0);
        assert!((lo - 0.005f64.powf(1.0 / 50.0)).abs() < 1e-12);
    }

    #[test]
    fn clopper_pearson_brackets_estimate() {
        for k in [1u64, 7, 50, 93] {
            let (lo, hi) = clopper_pearson(k, 100, 0.01);
            let p = k as f64 / 100.0;
            assert!(lo < p && p < hi);
            // coverage definition: P(Bin(n, hi) <= k) = alpha/2
            assert!((binomial_cdf(k, 100, hi) - 0.005).abs() < 1e-9);
        }
    }

    #[test]
    fn bisect_and_golden() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let m = grid_golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 64);
        assert!(m.abs() < 1e-20);
    }

    #[test]
    fn quadratic_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x).collect();
        assert!((quadratic_fit_r2(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
    }
}
