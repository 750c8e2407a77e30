//! Exhaustive and sampled sweeps of an inequality over events.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{distance_profile, q_point_profile, DistanceProfile, Functional, Verdict};
use crate::bounds::{evaluate, one_sided_moment_base, solve_a_q_alpha, BoundQuery};
use crate::distances::{perm_convex_distance, PenaltyKernel, WeightProfile};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::rng::{stream, with_workers, StreamRng};
use crate::spaces::{Event, ProductSpace};

/// Largest number of events "all" will enumerate.
pub const MAX_ALL_EVENTS: u64 = 1 << 20;
/// Events drawn when "all" is requested on a space with too many events.
pub const FALLBACK_SAMPLED_EVENTS: usize = 2000;
/// Largest alphabet of the symmetric-group sweep (`N!` points).
pub const MAX_PERMUTATION_N: usize = 8;

/// Ids accepted by [`sweep_exact`].
pub const SWEEP_EQUATIONS: &[&str] = &[
    "2.1.2", "2.1.3", "2.1.8", "2.1.9", "2.2.1", "2.2.6", "2.3.1", "2.3.6", "2.3.7", "2.4.4",
    "2.4.11", "2.4.13", "2.4.14", "3.1.2", "3.2.1", "4.1.2", "4.1.3", "4.2.5", "4.3.7", "5.2",
];

/// Which events a sweep visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventSource {
    /// Every nonempty event (falls back to sampling when there are more
    /// than [`MAX_ALL_EVENTS`]).
    All,
    /// `count` events drawn from per-event streams of the sweep seed.
    Random { count: usize },
    /// Explicit events, each a list of point indices.
    Explicit(Vec<Vec<u64>>),
}

/// One (event, parameter) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub event: String,
    pub p_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl CheckRow {
    /// `slack < -1e-9 max(1, rhs)`.
    pub fn is_counterexample(&self) -> bool {
        !(self.slack >= -1e-9 * self.rhs.max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCheckReport {
    pub equation: String,
    pub space: String,
    pub seed: u64,
    pub events: usize,
    pub rows: Vec<CheckRow>,
    pub counterexamples: Vec<CheckRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_solver_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

/// Parameters of a sweep. Unused grids are ignored by equations that do not
/// need them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub equation: String,
    pub t_grid: Vec<f64>,
    pub alphas: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub q: usize,
    pub p1: Option<f64>,
    pub kernel: Option<PenaltyKernel>,
    pub profile: Option<WeightProfile>,
    pub events: EventSource,
    pub seed: u64,
    pub workers: usize,
    /// Multiplies every right-hand side. Test hook for negative controls;
    /// leave at 1.
    #[doc(hidden)]
    pub bound_scale: f64,
}

impl SweepConfig {
    pub fn new(equation: &str) -> Self {
        Self {
            equation: equation.to_string(),
            t_grid: vec![0.25, 0.5, 1.0, 2.0],
            alphas: vec![1.0],
            u_grid: vec![1.0, 2.0, 3.0],
            q: 2,
            p1: None,
            kernel: None,
            profile: None,
            events: EventSource::All,
            seed: 0,
            workers: 1,
            bound_scale: 1.0,
        }
    }
}

/// Mask for small spaces, index list otherwise.
pub fn describe_indices(point_count: u64, indices: &[u64]) -> String {
    if point_count <= 64 {
        let mask = indices.iter().fold(0u64, |m, &i| m | 1 << i);
        format!("0x{mask:x}")
    } else {
        let parts: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn describe(space: &ProductSpace, a: &Event) -> String {
    let idx: Vec<u64> = a.points().iter().map(|y| space.index_of(y)).collect();
    describe_indices(space.point_count() as u64, &idx)
}

/// Random nonempty subset of `0..count`: each index is kept with a
/// probability drawn once from {1/8, 1/4, 1/2}.
pub fn random_subset(rng: &mut StreamRng, count: u64) -> Vec<u64> {
    let p = [0.125, 0.25, 0.5][rng.random_range(0..3usize)];
    loop {
        let picked: Vec<u64> = (0..count).filter(|_| rng.random::<f64>() < p).collect();
        if !picked.is_empty() {
            return picked;
        }
    }
}

/// Index lists of the events visited; each item is a tuple of `arity`
/// events (q-point sweeps use `arity = q`).
fn event_tuples(
    point_count: u64,
    source: &EventSource,
    arity: usize,
    seed: u64,
    notes: &mut Vec<String>,
) -> Result<Vec<Vec<Vec<u64>>>> {
    let sampled = |count: usize| -> Vec<Vec<Vec<u64>>> {
        (0..count as u64)
            .map(|i| {
                let mut rng = stream(seed, i);
                (0..arity).map(|_| random_subset(&mut rng, point_count)).collect()
            })
            .collect()
    };
    match source {
        EventSource::All => {
            if point_count >= 64 || (1u64 << point_count) - 1 > MAX_ALL_EVENTS {
                notes.push(format!(
                    "2^{point_count} - 1 events exceed the exhaustive limit; \
                     sampled {FALLBACK_SAMPLED_EVENTS} instead"
                ));
                return Ok(sampled(FALLBACK_SAMPLED_EVENTS));
            }
            if arity > 1 {
                notes.push(format!("all events, each repeated {arity} times"));
            }
            Ok((1..1u64 << point_count)
                .map(|mask| {
                    let idx: Vec<u64> = (0..point_count).filter(|b| mask >> b & 1 == 1).collect();
                    vec![idx; arity]
                })
                .collect())
        }
        EventSource::Random { count } => Ok(sampled(*count)),
        EventSource::Explicit(list) => {
            if list.is_empty() {
                return Err(Error::InvalidEvent("explicit event list is empty".into()));
            }
            if arity > 1 && list.len() != arity {
                notes.push(format!("explicit events used as one {arity}-tuple"));
            }
            if arity == 1 {
                Ok(list.iter().map(|e| vec![e.clone()]).collect())
            } else if list.len() == arity {
                Ok(vec![list.clone()])
            } else {
                Err(Error::InvalidArgument(format!(
                    "q-point sweep with q = {arity} needs exactly {arity} explicit events"
                )))
            }
        }
    }
}

struct Cell<'a> {
    cfg: &'a SweepConfig,
    n: usize,
}

impl Cell<'_> {
    fn rhs(&self, q: &BoundQuery, equation: &str) -> Result<f64> {
        Ok(evaluate(equation, q, self.cfg.kernel.as_ref())?.value * self.cfg.bound_scale)
    }

    fn query(&self, p_a: f64) -> BoundQuery {
        BoundQuery {
            n: Some(self.n),
            p_a: Some(p_a),
            ..Default::default()
        }
    }
}

fn row(event: &str, p_a: f64, lhs: f64, rhs: f64) -> CheckRow {
    CheckRow {
        event: event.to_string(),
        p_a,
        t: None,
        alpha: None,
        u: None,
        lhs,
        rhs,
        slack: rhs - lhs,
    }
}

fn alphas(cfg: &SweepConfig) -> Result<&[f64]> {
    if cfg.alphas.is_empty() || cfg.alphas.iter().any(|a| !(*a >= 1.0 && a.is_finite())) {
        return Err(Error::InvalidArgument("alpha grid must be nonempty with values >= 1".into()));
    }
    Ok(&cfg.alphas)
}

fn nonempty<'a>(name: &str, grid: &'a [f64]) -> Result<&'a [f64]> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} grid must be nonempty and finite")));
    }
    Ok(grid)
}

/// Rows of one event (or event tuple).
fn event_rows(
    space: &ProductSpace,
    cell: &Cell,
    events: &[Event],
    space_p1: Option<&ProductSpace>,
) -> Result<(Vec<CheckRow>, f64)> {
    let cfg = cell.cfg;
    let eq = cfg.equation.as_str();
    let a = &events[0];
    let label = events.iter().map(|e| describe(space, e)).collect::<Vec<_>>().join("|");
    let p_a = a.measure();
    let mut rows = Vec::new();
    let mut gap = 0.0f64;

    let moment_rows = |prof: &DistanceProfile,
                       rows: &mut Vec<CheckRow>,
                       q: BoundQuery,
                       alpha: Option<f64>|
     -> Result<()> {
        for &t in nonempty("t", &cfg.t_grid)? {
            let q = BoundQuery {
                t: Some(t),
                alpha,
                ..q.clone()
            };
            let mut r = row(&label, q.p_a.unwrap_or(p_a), prof.exp_moment(t), cell.rhs(&q, eq)?);
            r.t = Some(t);
            r.alpha = alpha;
            rows.push(r);
        }
        Ok(())
    };
    let tail_rows = |prof: &DistanceProfile, rows: &mut Vec<CheckRow>, q: BoundQuery| -> Result<()> {
        for &u in nonempty("u", &cfg.u_grid)? {
            let q = BoundQuery {
                u: Some(u),
                k: Some(u),
                t: Some(u),
                ..q.clone()
            };
            let mut r = row(&label, p_a, prof.tail(u), cell.rhs(&q, eq)?);
            r.u = Some(u);
            rows.push(r);
        }
        Ok(())
    };
    let hamming = |profile: Option<WeightProfile>| {
        distance_profile(space, a, &Functional::Hamming { profile })
    };
    let required_profile = || {
        cfg.profile
            .clone()
            .ok_or_else(|| Error::InvalidArgument(format!("{eq} needs a weight profile")))
    };
    let kernel = || {
        cfg.kernel
            .clone()
            .ok_or_else(|| Error::InvalidArgument(format!("{eq} needs a penalty kernel")))
    };
    let bernoulli = || {
        space
            .common_bernoulli()
            .ok_or_else(|| Error::InvalidSpace(format!("{eq} needs identical two-point factors")))
    };

    match eq {
        "2.1.2" => moment_rows(&hamming(None)?, &mut rows, cell.query(p_a), None)?,
        "2.1.3" => tail_rows(&hamming(None)?, &mut rows, cell.query(p_a))?,
        "2.1.8" | "2.1.9" => {
            let w = required_profile()?;
            let q = BoundQuery {
                profile: Some(w.weights().to_vec()),
                ..cell.query(p_a)
            };
            let prof = hamming(Some(w))?;
            if eq == "2.1.8" {
                moment_rows(&prof, &mut rows, q, None)?;
            } else {
                tail_rows(&prof, &mut rows, q)?;
            }
        }
        "2.2.1" | "2.2.6" => {
            let prof = hamming(None)?;
            for &alpha in alphas(cfg)? {
                moment_rows(&prof, &mut rows, cell.query(p_a), Some(alpha))?;
            }
        }
        "2.3.1" => {
            let p = bernoulli()?;
            let prof = hamming(None)?;
            let q = BoundQuery {
                p: Some(p),
                ..cell.query(p_a)
            };
            for &alpha in alphas(cfg)? {
                moment_rows(&prof, &mut rows, q.clone(), Some(alpha))?;
            }
        }
        "2.3.6" | "2.3.7" => {
            let p = bernoulli()?;
            let p1 = cfg
                .p1
                .ok_or_else(|| Error::InvalidArgument(format!("{eq} needs p1")))?;
            let sp1 = space_p1.expect("p1 space built with p1");
            let p1_a = Event::new(sp1, a.points().to_vec())?.measure();
            let prof = distance_profile(space, a, &Functional::OneSided)?;
            let q = BoundQuery {
                p: Some(p),
                p1: Some(p1),
                ..cell.query(p1_a)
            };
            if eq == "2.3.6" {
                for &alpha in alphas(cfg)? {
                    moment_rows(&prof, &mut rows, q.clone(), Some(alpha))?;
                }
            } else {
                let base = one_sided_moment_base(p, p1)?;
                let mut r = row(&label, p1_a, prof.exp_moment(base.ln()), cell.rhs(&q, eq)?);
                r.t = Some(base.ln());
                rows.push(r);
            }
        }
        "2.4.4" | "2.4.11" => {
            let prof = distance_profile(space, a, &Functional::Penalty(kernel()?))?;
            moment_rows(&prof, &mut rows, cell.query(p_a), None)?;
        }
        "2.4.13" | "2.4.14" => {
            let prof = distance_profile(space, a, &Functional::Penalty(kernel()?))?;
            tail_rows(&prof, &mut rows, cell.query(p_a))?;
        }
        "3.1.2" | "3.2.1" => {
            let refs: Vec<&Event> = events.iter().collect();
            let prof = q_point_profile(space, &refs)?;
            let product: f64 = events.iter().map(|e| e.measure()).product();
            let gm = product.powf(1.0 / cfg.q as f64);
            let q = BoundQuery {
                q: Some(cfg.q),
                ..cell.query(gm)
            };
            let grid: Vec<Option<f64>> = if eq == "3.1.2" {
                vec![None]
            } else {
                alphas(cfg)?.iter().map(|&a| Some(a)).collect()
            };
            for alpha in grid {
                let base = match alpha {
                    None => cfg.q as f64,
                    Some(al) => solve_a_q_alpha(cfg.q, al)?,
                };
                let q = BoundQuery { alpha, ..q.clone() };
                let mut r = row(&label, product, prof.exp_moment(base.ln()), cell.rhs(&q, eq)?);
                r.alpha = alpha;
                r.t = Some(base.ln());
                rows.push(r);
            }
        }
        "4.1.2" | "4.1.3" => {
            let prof = distance_profile(space, a, &Functional::Convex)?;
            gap = prof.max_gap;
            if eq == "4.1.2" {
                let mut r = row(&label, p_a, prof.exp_moment(0.25), cell.rhs(&cell.query(p_a), eq)?);
                r.t = Some(0.25);
                rows.push(r);
            } else {
                // tail of f_c, while the profile holds f_c^2
                let sq = DistanceProfile {
                    entries: prof.entries.iter().map(|&(m, v)| (m, v.max(0.0).sqrt())).collect(),
                    max_gap: prof.max_gap,
                };
                tail_rows(&sq, &mut rows, cell.query(p_a))?;
            }
        }
        "4.2.5" => {
            for &alpha in alphas(cfg)? {
                let prof = distance_profile(space, a, &Functional::Xi { alpha })?;
                gap = gap.max(prof.max_gap);
                let q = BoundQuery {
                    alpha: Some(alpha),
                    ..cell.query(p_a)
                };
                let mut r = row(&label, p_a, prof.exp_moment(1.0), cell.rhs(&q, eq)?);
                r.alpha = Some(alpha);
                r.t = Some(1.0);
                rows.push(r);
            }
        }
        "4.3.7" => {
            if space.common_bernoulli() != Some(0.5) {
                return Err(Error::InvalidSpace(
                    "4.3.7 holds on uniform two-point factors only".into(),
                ));
            }
            let prof = distance_profile(space, a, &Functional::Convex)?;
            gap = prof.max_gap;
            for &alpha in alphas(cfg)? {
                let c = alpha / (alpha + 1.0);
                // rhs is P(A)^-α, which is the 4.2.5 value
                let q = BoundQuery {
                    alpha: Some(alpha),
                    ..cell.query(p_a)
                };
                let rhs = evaluate("4.2.5", &q, None)?.value * cfg.bound_scale;
                let mut r = row(&label, p_a, prof.exp_moment(c), rhs);
                r.alpha = Some(alpha);
                r.t = Some(c);
                rows.push(r);
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!("no exact sweep for equation {other:?}")))
        }
    }
    Ok((rows, gap))
}

fn finish(
    cfg: &SweepConfig,
    space: String,
    events: usize,
    results: Vec<(Vec<CheckRow>, f64)>,
    mut notes: Vec<String>,
    track_gap: bool,
) -> ExactCheckReport {
    let mut rows = Vec::new();
    let mut max_gap = 0.0f64;
    for (r, g) in results {
        rows.extend(r);
        max_gap = max_gap.max(g);
    }
    let counterexamples: Vec<CheckRow> =
        rows.iter().filter(|r| r.is_counterexample()).cloned().collect();
    if cfg.bound_scale != 1.0 {
        notes.push(format!("right-hand sides scaled by {}", cfg.bound_scale));
    }
    ExactCheckReport {
        equation: cfg.equation.clone(),
        space,
        seed: cfg.seed,
        events,
        verdict: Verdict::from_pass(counterexamples.is_empty()),
        rows,
        counterexamples,
        max_solver_gap: track_gap.then_some(max_gap),
        notes,
    }
}

/// Checks `cfg.equation` on every visited event and grid cell.
pub fn sweep_exact(space: &ProductSpace, cfg: &SweepConfig) -> Result<ExactCheckReport> {
    if cfg.equation == "5.2" {
        return Err(Error::InvalidArgument(
            "5.2 lives on the symmetric group; use sweep_permutations".into(),
        ));
    }
    if !SWEEP_EQUATIONS.contains(&cfg.equation.as_str()) {
        return Err(Error::InvalidArgument(format!(
            "no exact sweep for equation {:?}",
            cfg.equation
        )));
    }
    let point_count = space.point_count();
    if !space.is_enumerable() {
        return Err(Error::TooLargeToEnumerate {
            count: point_count,
            cap: space.enumeration_cap(),
        });
    }
    let arity = if matches!(cfg.equation.as_str(), "3.1.2" | "3.2.1") {
        if cfg.q < 2 {
            return Err(Error::InvalidArgument(format!("q = {} must be >= 2", cfg.q)));
        }
        cfg.q
    } else {
        1
    };
    let space_p1 = match (cfg.equation.as_str(), cfg.p1) {
        ("2.3.6" | "2.3.7", Some(p1)) => Some(
            ProductSpace::bernoulli(p1, space.dim())?.with_enumeration_cap(space.enumeration_cap()),
        ),
        _ => None,
    };
    let mut notes = Vec::new();
    let tuples = event_tuples(point_count as u64, &cfg.events, arity, cfg.seed, &mut notes)?;
    let cell = Cell { cfg, n: space.dim() };
    let results: Result<Vec<_>> = with_workers(cfg.workers, || {
        tuples
            .par_iter()
            .map(|tuple| {
                let events: Vec<Event> = tuple
                    .iter()
                    .map(|idx| Event::from_indices(space, idx))
                    .collect::<Result<_>>()?;
                event_rows(space, &cell, &events, space_p1.as_ref())
            })
            .collect()
    });
    let track_gap = matches!(cfg.equation.as_str(), "4.1.2" | "4.1.3" | "4.2.5" | "4.3.7");
    Ok(finish(cfg, space.summary(), tuples.len(), results?, notes, track_gap))
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// `∫ exp(f(A, σ)/16) dP_N(σ) <= 1/P_N(A)` over events of the uniform
/// symmetric group `S_n`. Events index [`permutations`].
pub fn sweep_permutations(n: usize, cfg: &SweepConfig) -> Result<ExactCheckReport> {
    if n == 0 || n > MAX_PERMUTATION_N {
        return Err(Error::InvalidArgument(format!(
            "symmetric group size must be in 1..={MAX_PERMUTATION_N}"
        )));
    }
    let perms = permutations(n);
    let count = perms.len() as u64;
    let mut notes = Vec::new();
    let tuples = event_tuples(count, &cfg.events, 1, cfg.seed, &mut notes)?;
    let mass = 1.0 / count as f64;
    let results: Result<Vec<_>> = with_workers(cfg.workers, || {
        tuples
            .par_iter()
            .map(|tuple| {
                let idx = &tuple[0];
                if let Some(bad) = idx.iter().find(|&&i| i >= count) {
                    return Err(Error::InvalidEvent(format!("permutation index {bad} out of range")));
                }
                let members: Vec<Vec<usize>> = idx.iter().map(|&i| perms[i as usize].clone()).collect();
                let mut s = KahanSum::new();
                let mut gap = 0.0f64;
                for sigma in &perms {
                    let r = perm_convex_distance(&members, sigma)?;
                    gap = gap.max(r.gap);
                    s.add(mass * (r.value / 16.0).exp());
                }
                let p_a = idx.len() as f64 * mass;
                let q = BoundQuery {
                    n: Some(n),
                    p_a: Some(p_a),
                    ..Default::default()
                };
                let rhs = evaluate("5.2", &q, None)?.value * cfg.bound_scale;
                let mut r = row(&describe_indices(count, idx), p_a, s.value(), rhs);
                r.t = Some(1.0 / 16.0);
                Ok((vec![r], gap))
            })
            .collect()
    });
    Ok(finish(cfg, format!("S{n}"), tuples.len(), results?, notes, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_all_events() {
        let s = ProductSpace::uniform(2, 3).unwrap();
        let r = sweep_exact(&s, &SweepConfig::new("2.1.2")).unwrap();
        assert_eq!(r.events, 255);
        assert_eq!(r.rows.len(), 1020);
        assert!(r.counterexamples.is_empty());
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn scaled_bound_fails() {
        let s = ProductSpace::uniform(2, 2).unwrap();
        let mut cfg = SweepConfig::new("2.1.2");
        cfg.bound_scale = 0.01;
        let r = sweep_exact(&s, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.counterexamples.is_empty());
    }

    #[test]
    fn one_sided_base_all_events() {
        let s = ProductSpace::bernoulli(0.3, 3).unwrap();
        let mut cfg = SweepConfig::new("2.3.7");
        cfg.p1 = Some(0.5);
        let r = sweep_exact(&s, &cfg).unwrap();
        assert_eq!(r.rows.len(), 255);
        assert!(r.counterexamples.is_empty());
        assert!((r.rows[0].t.unwrap() - (7.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn q_point_all_events() {
        let s = ProductSpace::uniform(2, 3).unwrap();
        let r = sweep_exact(&s, &SweepConfig::new("3.1.2")).unwrap();
        assert_eq!(r.rows.len(), 255);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn sampled_events_are_reproducible() {
        let s = ProductSpace::uniform(2, 4).unwrap();
        let mut cfg = SweepConfig::new("4.1.2");
        cfg.events = EventSource::Random { count: 20 };
        cfg.seed = 9;
        let a = sweep_exact(&s, &cfg).unwrap();
        cfg.workers = 4;
        let b = sweep_exact(&s, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.max_solver_gap.unwrap() <= 1e-9);
    }

    #[test]
    fn all_falls_back_to_sampling() {
        let s = ProductSpace::uniform(3, 3).unwrap();
        let mut cfg = SweepConfig::new("2.1.2");
        cfg.t_grid = vec![1.0];
        let r = sweep_exact(&s, &cfg).unwrap();
        assert_eq!(r.events, FALLBACK_SAMPLED_EVENTS);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn explicit_events_and_errors() {
        let s = ProductSpace::uniform(2, 2).unwrap();
        let mut cfg = SweepConfig::new("2.1.2");
        cfg.events = EventSource::Explicit(vec![vec![0], vec![1, 2]]);
        let r = sweep_exact(&s, &cfg).unwrap();
        assert_eq!(r.rows[0].event, "0x1");
        assert_eq!(r.rows[4].event, "0x6");
        assert!(sweep_exact(&s, &SweepConfig::new("9.9")).is_err());
        let s3 = ProductSpace::uniform(3, 2).unwrap();
        assert!(sweep_exact(&s3, &SweepConfig::new("2.3.1")).is_err());
        assert!(sweep_exact(&s, &SweepConfig::new("2.4.4")).is_err());
    }

    #[test]
    fn permutations_in_order() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[1], vec![0, 2, 1]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn symmetric_group_sweep() {
        let mut cfg = SweepConfig::new("5.2");
        cfg.events = EventSource::Random { count: 30 };
        let r = sweep_permutations(4, &cfg).unwrap();
        assert_eq!(r.rows.len(), 30);
        assert!(r.counterexamples.is_empty());
    }
}
