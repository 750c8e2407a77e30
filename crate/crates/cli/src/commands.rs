//! Subcommand bodies. Each returns `Ok(passed)`.

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use conclab_core::apps::binpack::{binpack_experiment, BinpackConfig, PackMode};
use conclab_core::apps::fpp::{fpp_experiment, FppConfig};
use conclab_core::apps::spin::{spin_glass_experiment, Disorder, SpinExperimentConfig, SpinGlassConfig};
use conclab_core::apps::subseq::{subsequence_experiment, SubseqConfig};
use conclab_core::apps::supsum::{supsum_experiment, SupsumConfig, SupsumMode};
use conclab_core::apps::{AppReport, Run};
use conclab_core::bounds::{evaluate, BoundQuery, BoundValue, EQUATIONS};
use conclab_core::distances::{
    convex_distance, hamming_distance, one_sided_distance, penalty_distance, q_point_distance,
    xi_distance_result, PenaltyKernel, WeightProfile,
};
use conclab_core::formats::{parse_event_json, parse_grid, parse_space_spec, EventSpec};
use conclab_core::selftest::{run_selftest, SelftestOptions, CRITERIA};
use conclab_core::spaces::{Event, Point, ProductSpace};
use conclab_core::verify::report::{exact_csv, rows_to_csv, to_json};
use conclab_core::verify::{
    compare_tail_to_bound, mc_tail, sweep_exact, sweep_permutations, EventSource, SweepConfig,
    TailComparison, TailEstimate, Verdict, MAX_PERMUTATION_N, SWEEP_EQUATIONS,
};

use crate::{read_limited, AppName, CliError, Params};

type Res<T> = Result<T, CliError>;

/// Smallest sample count accepted by `mc`.
const MIN_MC_SAMPLES: u64 = 1000;

fn csv_wanted(p: &Params) -> bool {
    p.format.as_deref() == Some("csv")
}

/// Writes to `--out` or standard output.
fn emit(p: &Params, body: &str) -> Res<()> {
    match &p.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::flag("out", format!("{}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::new(format!("stdout: {e}")))
        }
    }
}

fn grid(flag: &'static str, s: &Option<String>) -> Res<Option<Vec<f64>>> {
    s.as_deref()
        .map(|s| parse_grid(s).map_err(|e| CliError::flag(flag, e)))
        .transpose()
}

fn require<'a, T>(flag: &'static str, v: &'a Option<T>) -> Res<&'a T> {
    v.as_ref().ok_or_else(|| CliError::flag(flag, "required"))
}

fn space(p: &Params) -> Res<ProductSpace> {
    parse_space_spec(require("space", &p.space)?).map_err(|e| CliError::flag("space", e))
}

fn profile(p: &Params) -> Res<Option<Vec<f64>>> {
    grid("profile", &p.profile)
}

fn kernel(p: &Params, space: Option<&ProductSpace>) -> Res<Option<PenaltyKernel>> {
    let Some(c) = p.kernel_c else {
        return Ok(None);
    };
    let space = space.ok_or_else(|| CliError::flag("kernel-c", "needs --space"))?;
    let factor = space
        .common_factor()
        .ok_or_else(|| CliError::flag("kernel-c", "the factors of the space differ"))?;
    PenaltyKernel::zero_one(factor, c)
        .map(Some)
        .map_err(|e| CliError::flag("kernel-c", e))
}

/// Inline JSON, or a path to a JSON file.
fn json_text(flag: &'static str, s: &str) -> Res<String> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(s.to_string())
    } else {
        read_limited(std::path::Path::new(s), flag)
    }
}

fn event_specs(p: &Params) -> Res<Vec<EventSpec>> {
    let text = json_text("events", require("events", &p.events)?)?;
    parse_event_json(&text).map_err(|e| CliError::flag("events", e))
}

fn resolve_events(p: &Params, space: &ProductSpace) -> Res<Vec<Event>> {
    event_specs(p)?
        .iter()
        .map(|e| e.resolve(space).map_err(|e| CliError::flag("events", e)))
        .collect()
}

fn parse_point(s: &str) -> Res<Point> {
    let t = s.trim();
    let coords: Result<Vec<usize>, String> = if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| e.to_string())
    } else {
        t.split(',')
            .map(|c| c.trim().parse::<usize>().map_err(|_| format!("bad coordinate {c:?}")))
            .collect()
    };
    coords.map(Point).map_err(|e| CliError::flag("point", e))
}

fn json_line<T: Serialize>(v: &T) -> Res<String> {
    serde_json::to_string(v).map_err(|e| CliError::new(e.to_string()))
}

fn pretty<T: Serialize>(v: &T) -> Res<String> {
    Ok(to_json(v)?)
}

pub fn bound(p: &Params) -> Res<bool> {
    let eqs: Vec<&str> = require("eq", &p.eq)?.split(',').map(str::trim).collect();
    if let Some(bad) = eqs.iter().find(|e| !EQUATIONS.contains(e)) {
        return Err(CliError::flag("eq", format!("unknown equation id {bad:?}")));
    }
    let sp = p.space.as_ref().map(|_| space(p)).transpose()?;
    let kernel = kernel(p, sp.as_ref())?;
    let alphas: Vec<Option<f64>> = match grid("alpha", &p.alpha)? {
        Some(v) => v.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let ts: Vec<Option<f64>> = match grid("t-grid", &p.t_grid)? {
        Some(v) => v.into_iter().map(Some).collect(),
        None => vec![p.t],
    };
    let us: Vec<Option<f64>> = match grid("u-grid", &p.u_grid)? {
        Some(v) => v.into_iter().map(Some).collect(),
        None => vec![p.u],
    };
    let base = BoundQuery {
        n: p.n.or(sp.as_ref().map(|s| s.dim())),
        p_a: p.p_a,
        k: p.k,
        q: p.q,
        p: p.p.or(sp.as_ref().and_then(|s| s.common_bernoulli())),
        p1: p.p1,
        profile: profile(p)?,
        big_k: p.big_k,
        q0: p.q0,
        median: p.median,
        scale: p.scale,
        ..Default::default()
    };
    let mut values: Vec<BoundValue> = Vec::new();
    for eq in &eqs {
        for &alpha in &alphas {
            for &t in &ts {
                for &u in &us {
                    let q = BoundQuery {
                        alpha,
                        t,
                        u,
                        ..base.clone()
                    };
                    let v = evaluate(eq, &q, kernel.as_ref())
                        .map_err(|e| CliError::flag("eq", format!("{eq}: {e}")))?;
                    values.push(v);
                }
            }
        }
    }
    let body = if csv_wanted(p) {
        #[derive(Serialize)]
        struct Row<'a> {
            equation: &'a str,
            value: f64,
            t: Option<f64>,
            k: Option<f64>,
            u: Option<f64>,
            alpha: Option<f64>,
            optimal_alpha: Option<f64>,
            notes: String,
        }
        rows_to_csv(values.iter().map(|v| Row {
            equation: &v.equation,
            value: v.value,
            t: v.params.t,
            k: v.params.k,
            u: v.params.u,
            alpha: v.params.alpha,
            optimal_alpha: v.optimal_alpha,
            notes: v.notes.join("; "),
        }))?
    } else {
        let mut s = String::new();
        for v in &values {
            s.push_str(&json_line(v)?);
            s.push('\n');
        }
        s
    };
    emit(p, &body)?;
    Ok(true)
}

/// A distance functional chosen on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Hamming,
    OneSided,
    Penalty,
    QPoint,
    Convex,
    Xi,
}

impl Func {
    fn parse(s: &str) -> Res<Func> {
        Ok(match s {
            "hamming" => Func::Hamming,
            "one-sided" => Func::OneSided,
            "penalty" => Func::Penalty,
            "q-point" => Func::QPoint,
            "convex" => Func::Convex,
            "xi" => Func::Xi,
            other => return Err(CliError::flag("functional", format!("unknown functional {other:?}"))),
        })
    }
}

/// Evaluates one functional; `sets` holds one event, or the q-tuple.
struct Evaluator {
    func: Func,
    space: ProductSpace,
    sets: Vec<Event>,
    profile: Option<WeightProfile>,
    kernel: Option<PenaltyKernel>,
    alpha: f64,
}

impl Evaluator {
    fn new(p: &Params, func: Func, space: ProductSpace, sets: Vec<Event>) -> Res<Self> {
        let profile = profile(p)?
            .map(WeightProfile::new)
            .transpose()
            .map_err(|e| CliError::flag("profile", e))?;
        let kernel = kernel(p, Some(&space))?;
        if func == Func::Penalty && kernel.is_none() {
            return Err(CliError::flag("kernel-c", "required by the penalty functional"));
        }
        let alphas = grid("alpha", &p.alpha)?.unwrap_or_else(|| vec![1.0]);
        if alphas.len() != 1 {
            return Err(CliError::flag("alpha", "takes a single value here"));
        }
        if func == Func::QPoint && sets.len() < 2 {
            return Err(CliError::flag("events", "q-point needs a list of at least 2 events"));
        }
        if func != Func::QPoint && sets.len() != 1 {
            return Err(CliError::flag("events", "expected exactly one event"));
        }
        Ok(Self {
            func,
            space,
            sets,
            profile,
            kernel,
            alpha: alphas[0],
        })
    }

    fn value(&self, x: &Point) -> conclab_core::Result<f64> {
        let (s, a) = (&self.space, &self.sets[0]);
        Ok(match self.func {
            Func::Hamming => hamming_distance(s, a, x, self.profile.as_ref())?,
            Func::OneSided => one_sided_distance(s, a, x)? as f64,
            Func::Penalty => penalty_distance(s, a, x, self.kernel.as_ref().expect("checked"))?,
            Func::QPoint => {
                let refs: Vec<&Event> = self.sets.iter().collect();
                q_point_distance(s, &refs, x)? as f64
            }
            Func::Convex => convex_distance(s, a, x)?.distance(),
            Func::Xi => xi_distance_result(s, a, x, self.alpha)?.value,
        })
    }
}

pub fn distance(p: &Params) -> Res<bool> {
    let sp = space(p)?;
    let func = Func::parse(p.functional.as_deref().unwrap_or("hamming"))?;
    let sets = resolve_events(p, &sp)?;
    let x = parse_point(require("point", &p.point)?)?;
    sp.validate_point(&x).map_err(|e| CliError::flag("point", e))?;
    let ev = Evaluator::new(p, func, sp, sets)?;
    let solver = match func {
        Func::Convex => Some(convex_distance(&ev.space, &ev.sets[0], &x)?),
        Func::Xi => Some(xi_distance_result(&ev.space, &ev.sets[0], &x, ev.alpha)?),
        _ => None,
    };
    let value = ev.value(&x)?;
    let p_a: Vec<f64> = ev.sets.iter().map(|a| a.measure()).collect();
    let body = if csv_wanted(p) {
        #[derive(Serialize)]
        struct Row<'a> {
            functional: &'a str,
            space: String,
            point: String,
            p_a: f64,
            value: f64,
        }
        rows_to_csv([Row {
            functional: p.functional.as_deref().unwrap_or("hamming"),
            space: ev.space.summary(),
            point: json_line(&x.0)?,
            p_a: p_a[0],
            value,
        }])?
    } else {
        let mut v = json!({
            "functional": p.functional.as_deref().unwrap_or("hamming"),
            "space": ev.space.summary(),
            "point": x.0,
            "p_a": if p_a.len() == 1 { json!(p_a[0]) } else { json!(p_a) },
            "value": value,
        });
        if let Some(s) = solver {
            v["solver"] = serde_json::to_value(s).map_err(|e| CliError::new(e.to_string()))?;
        }
        pretty(&v)?
    };
    emit(p, &body)?;
    Ok(true)
}

fn event_source(p: &Params, space: Option<&ProductSpace>) -> Res<EventSource> {
    let s = p.events.as_deref().unwrap_or("all").trim();
    if s == "all" {
        return Ok(EventSource::All);
    }
    if let Some(n) = s.strip_prefix("random:") {
        let count: usize = n
            .parse()
            .map_err(|_| CliError::flag("events", format!("bad count {n:?}")))?;
        if count == 0 {
            return Err(CliError::flag("events", "random:0 visits nothing"));
        }
        return Ok(EventSource::Random { count });
    }
    let space = space.ok_or_else(|| CliError::flag("events", "explicit events need --space"))?;
    let list = resolve_events(p, space)?
        .iter()
        .map(|a| a.points().iter().map(|x| space.index_of(x)).collect())
        .collect();
    Ok(EventSource::Explicit(list))
}

pub fn verify_exact(p: &Params, workers: usize) -> Res<bool> {
    let eq = require("eq", &p.eq)?.trim();
    if !SWEEP_EQUATIONS.contains(&eq) {
        return Err(CliError::flag(
            "eq",
            format!("{eq:?} cannot be swept; choose one of {}", SWEEP_EQUATIONS.join(", ")),
        ));
    }
    let mut cfg = SweepConfig::new(eq);
    if let Some(g) = grid("t-grid", &p.t_grid)? {
        cfg.t_grid = g;
    }
    if let Some(g) = grid("u-grid", &p.u_grid)? {
        cfg.u_grid = g;
    }
    if let Some(a) = grid("alpha", &p.alpha)? {
        cfg.alphas = a;
    }
    if let Some(q) = p.q {
        cfg.q = q;
    }
    cfg.p1 = p.p1;
    cfg.seed = p.seed.unwrap_or(0);
    cfg.workers = workers;
    if let Some(s) = p.bound_scale {
        cfg.bound_scale = s;
    }
    cfg.profile = profile(p)?
        .map(WeightProfile::new)
        .transpose()
        .map_err(|e| CliError::flag("profile", e))?;
    let report = if eq == "5.2" {
        if p.space.is_some() {
            return Err(CliError::flag("space", "5.2 sweeps the symmetric group; give --N"));
        }
        let n = *require("N", &p.n)?;
        if !(1..=MAX_PERMUTATION_N).contains(&n) {
            return Err(CliError::flag("N", format!("must be in 1..={MAX_PERMUTATION_N}")));
        }
        cfg.events = event_source(p, None)?;
        sweep_permutations(n, &cfg)?
    } else {
        if p.n.is_some() {
            return Err(CliError::flag("N", "only used by 5.2; the space fixes the dimension"));
        }
        let sp = space(p)?;
        cfg.kernel = kernel(p, Some(&sp))?;
        cfg.events = event_source(p, Some(&sp))?;
        sweep_exact(&sp, &cfg)?
    };
    let body = if csv_wanted(p) { exact_csv(&report)? } else { pretty(&report)? };
    emit(p, &body)?;
    if !report.counterexamples.is_empty() {
        eprintln!("{} counterexample(s)", report.counterexamples.len());
    }
    Ok(report.verdict.passed())
}

/// Tail bounds `mc` can compare against, with the functional they bound
/// and the query field carrying the threshold.
fn tail_spec(eq: &str) -> Option<(Func, &'static str)> {
    Some(match eq {
        "2.1.3" | "2.1.9" | "2.2.7" | "2.3.5" => (Func::Hamming, "k"),
        "2.4.13" | "2.4.14" => (Func::Penalty, "u"),
        "3.1.3" | "3.2.3" | "3.2.4" => (Func::QPoint, "k"),
        "4.1.3" | "4.2.6" | "4.2.7" | "4.3.7" | "4.3.8" => (Func::Convex, "t"),
        _ => return None,
    })
}

#[derive(Serialize)]
struct McReport {
    functional: String,
    space: String,
    p_a: f64,
    estimate: TailEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<TailComparison>,
    verdict: Verdict,
}

pub fn mc(p: &Params, workers: usize) -> Res<bool> {
    let sp = space(p)?;
    let eq = p.eq.as_deref().map(str::trim);
    let spec = eq
        .map(|e| {
            tail_spec(e).ok_or_else(|| CliError::flag("eq", format!("{e:?} is not a supported tail bound")))
        })
        .transpose()?;
    let func = match (&p.functional, spec) {
        (Some(f), Some((g, _))) => {
            let f = Func::parse(f)?;
            if f != g {
                return Err(CliError::flag("functional", "does not match the functional bounded by --eq"));
            }
            f
        }
        (Some(f), None) => Func::parse(f)?,
        (None, Some((g, _))) => g,
        (None, None) => Func::Hamming,
    };
    let u_grid = grid("u-grid", &p.u_grid)?.ok_or_else(|| CliError::flag("u-grid", "required"))?;
    let samples = p.samples.unwrap_or(10_000);
    if samples < MIN_MC_SAMPLES {
        return Err(CliError::flag("samples", format!("must be at least {MIN_MC_SAMPLES}")));
    }
    let mut sets = resolve_events(p, &sp)?;
    if func == Func::QPoint && sets.len() == 1 {
        // q copies of one set
        let q = p.q.unwrap_or(2);
        sets = vec![sets[0].clone(); q];
    }
    let ev = Evaluator::new(p, func, sp, sets)?;
    let p_a = ev.sets[0].measure();
    let seed = p.seed.unwrap_or(0);
    let name = p.functional.clone().unwrap_or_else(|| format!("{func:?}").to_lowercase());
    let failure = std::sync::Mutex::new(None);
    let estimate = mc_tail(
        &name,
        |rng| {
            let x = ev.space.sample_point(rng);
            ev.value(&x).unwrap_or_else(|e| {
                failure.lock().expect("no poisoning").get_or_insert(e);
                f64::NAN
            })
        },
        &u_grid,
        samples,
        seed,
        workers,
    )?;
    if let Some(e) = failure.into_inner().expect("no poisoning") {
        return Err(e.into());
    }
    let comparison = match (eq, spec) {
        (Some(eq), Some((_, field))) => {
            let alpha = grid("alpha", &p.alpha)?.map(|v| v[0]);
            let bounds = u_grid
                .iter()
                .map(|&u| {
                    let mut q = BoundQuery {
                        n: Some(ev.space.dim()),
                        p_a: Some(p_a),
                        alpha,
                        q: Some(ev.sets.len()),
                        p: ev.space.common_bernoulli(),
                        profile: profile(p)?,
                        big_k: p.big_k,
                        q0: p.q0,
                        ..Default::default()
                    };
                    match field {
                        "k" => {
                            q.k = Some(u);
                            if eq == "2.1.9" {
                                q.u = Some(u);
                            }
                        }
                        "u" => q.u = Some(u),
                        _ => q.t = Some(u),
                    }
                    Ok((u, evaluate(eq, &q, ev.kernel.as_ref())?))
                })
                .collect::<Res<Vec<_>>>()?;
            Some(compare_tail_to_bound(&name, &estimate, &bounds)?)
        }
        _ => None,
    };
    let verdict = comparison.as_ref().map_or(Verdict::Report, |c| c.verdict);
    let report = McReport {
        functional: name,
        space: ev.space.summary(),
        p_a,
        estimate,
        comparison,
        verdict,
    };
    let body = if csv_wanted(p) {
        #[derive(Serialize)]
        struct Row {
            u: f64,
            count: u64,
            n: u64,
            estimate: f64,
            cp_upper: f64,
            bound: Option<f64>,
            pass: Option<bool>,
        }
        let cmp = report.comparison.as_ref();
        rows_to_csv(report.estimate.rows.iter().enumerate().map(|(i, r)| Row {
            u: r.u,
            count: r.count,
            n: r.n,
            estimate: r.estimate,
            cp_upper: r.cp_upper,
            bound: cmp.map(|c| c.rows[i].bound),
            pass: cmp.map(|c| c.rows[i].pass),
        }))?
    } else {
        pretty(&report)?
    };
    emit(p, &body)?;
    Ok(report.verdict.passed())
}

fn run_settings(p: &Params, workers: usize) -> Res<Run> {
    Ok(Run {
        samples: p.samples.unwrap_or(Run::default().samples),
        seed: p.seed.unwrap_or(0),
        workers,
        grid: grid("u-grid", &p.u_grid)?,
    })
}

/// Rejects app flags that the chosen experiment ignores.
fn only_for(p: &Params, name: AppName) -> Res<()> {
    let used: &[&str] = match name {
        AppName::Lis => &[],
        AppName::Lcs => &["N2", "alphabet"],
        AppName::Supsum => &["mode", "ks", "q", "quantile"],
        AppName::Binpack => &["mode"],
        AppName::Fpp => &[],
        AppName::Spin => &["beta", "disorder"],
    };
    let specific = ["N2", "alphabet", "mode", "ks", "q", "quantile", "beta", "disorder"];
    match p.present().into_iter().find(|f| specific.contains(f) && !used.contains(f)) {
        Some(f) => Err(CliError {
            flag: Some(f),
            message: format!("not used by app {name:?}").to_lowercase(),
        }),
        None => Ok(()),
    }
}

fn supsum_mode(p: &Params) -> Res<SupsumMode> {
    let mode = p.mode.as_deref().unwrap_or("linear");
    if mode != "q-point" && (p.ks.is_some() || p.q.is_some() || p.quantile.is_some()) {
        return Err(CliError::flag("mode", "--ks, --q and --quantile need --mode q-point"));
    }
    Ok(match mode {
        "linear" => SupsumMode::Linear,
        "permutation-sigma" => SupsumMode::PermutationSigma,
        "permutation-a" => SupsumMode::PermutationA,
        "q-point" => {
            let ks = grid("ks", &p.ks)?
                .unwrap_or_else(|| vec![2.0, 4.0])
                .into_iter()
                .map(|k| {
                    if k >= 1.0 && k.fract() == 0.0 {
                        Ok(k as usize)
                    } else {
                        Err(CliError::flag("ks", format!("{k} is not a positive integer")))
                    }
                })
                .collect::<Res<Vec<_>>>()?;
            SupsumMode::QPoint {
                q: p.q.unwrap_or(2),
                ks,
                quantile: p.quantile.unwrap_or(0.6),
            }
        }
        other => return Err(CliError::flag("mode", format!("unknown supsum mode {other:?}"))),
    })
}

pub fn app(name: AppName, p: &Params, workers: usize) -> Res<bool> {
    only_for(p, name)?;
    let run = run_settings(p, workers)?;
    let report: AppReport = match name {
        AppName::Lis => {
            let mut c = SubseqConfig::lis(p.n.unwrap_or(1000));
            c.run = run;
            subsequence_experiment(&c)?
        }
        AppName::Lcs => {
            let n = p.n.unwrap_or(500);
            let mut c = SubseqConfig::lcs(n, p.n2.unwrap_or(n), p.alphabet.unwrap_or(2));
            c.run = run;
            subsequence_experiment(&c)?
        }
        AppName::Supsum => {
            let mut c = SupsumConfig::new(supsum_mode(p)?, p.n.unwrap_or(100));
            c.run = run;
            supsum_experiment(&c)?
        }
        AppName::Binpack => {
            let mode = match p.mode.as_deref().unwrap_or("auto") {
                "exact" => PackMode::Exact,
                "ffd" => PackMode::Ffd,
                "auto" => PackMode::Auto,
                other => return Err(CliError::flag("mode", format!("unknown packing mode {other:?}"))),
            };
            let c = BinpackConfig {
                n: p.n.unwrap_or(200),
                mode,
                run,
                ..Default::default()
            };
            binpack_experiment(&c)?
        }
        AppName::Fpp => {
            let c = FppConfig {
                n: p.n.unwrap_or(20),
                run,
                ..Default::default()
            };
            fpp_experiment(&c)?
        }
        AppName::Spin => {
            let mut model = SpinGlassConfig::new(p.n.unwrap_or(20), p.beta.unwrap_or(0.5))
                .map_err(|e| CliError::flag("beta", e))?;
            model.disorder = match p.disorder.as_deref().unwrap_or("normal") {
                "normal" => Disorder::Normal,
                "rademacher" => Disorder::Rademacher,
                "uniform" => Disorder::Uniform,
                other => return Err(CliError::flag("disorder", format!("unknown disorder {other:?}"))),
            };
            spin_glass_experiment(&SpinExperimentConfig { model, run })?
        }
    };
    let body = if csv_wanted(p) { report.to_csv()? } else { pretty(&report)? };
    emit(p, &body)?;
    Ok(report.verdict.passed())
}

pub fn selftest(p: &Params, workers: usize) -> Res<bool> {
    let only = grid("only", &p.only)?
        .map(|ids| {
            ids.into_iter()
                .map(|i| {
                    if i >= 1.0 && i <= CRITERIA as f64 && i.fract() == 0.0 {
                        Ok(i as u8)
                    } else {
                        Err(CliError::flag("only", format!("no criterion {i}")))
                    }
                })
                .collect::<Res<Vec<u8>>>()
        })
        .transpose()?;
    let opts = SelftestOptions {
        quick: p.quick,
        workers,
        seed: p.seed.unwrap_or(0),
        only,
        bound_scale: p.bound_scale.unwrap_or(1.0),
    };
    let summary = run_selftest(&opts, |r| eprintln!("{}", r.line()));
    let body = if csv_wanted(p) {
        #[derive(Serialize)]
        struct Row<'a> {
            criterion: u8,
            title: &'a str,
            pass: bool,
            seconds: f64,
            detail: &'a str,
        }
        rows_to_csv(summary.results.iter().map(|r| Row {
            criterion: r.id,
            title: &r.title,
            pass: r.pass,
            seconds: r.seconds,
            detail: &r.detail,
        }))?
    } else if p.out.is_some() {
        pretty(&summary)?
    } else {
        summary.table()
    };
    emit(p, &body)?;
    Ok(summary.all_passed())
}
