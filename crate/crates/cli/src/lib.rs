//! `conclab` command line.
//!
//! Every subcommand reads the same flag set; a flag that a subcommand does
//! not use is a usage error rather than being silently ignored. A JSON
//! config file (`--config`) may supply any flag under its long name, and the
//! command line overrides it.
//!
//! Exit codes: 0 success or pass, 1 counterexample or failed verdict,
//! 2 usage or input error.

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer};

use conclab_core::formats::MAX_INPUT;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONCLAB_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "conclab", version, about = "Concentration inequalities on finite product spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppName {
    Lis,
    Lcs,
    Supsum,
    Binpack,
    Fpp,
    Spin,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate closed-form bounds; one JSON line per value.
    Bound(Params),
    /// Distance of one point to an event.
    Distance(Params),
    /// Check an inequality exactly over a family of events.
    VerifyExact(Params),
    /// Monte Carlo tail of a distance, optionally against a tail bound.
    Mc(Params),
    /// Run an application experiment.
    App {
        name: AppName,
        #[command(flatten)]
        params: Params,
    },
    /// Run the acceptance suite.
    Selftest(Params),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Distance(_) => "distance",
            Command::VerifyExact(_) => "verify-exact",
            Command::Mc(_) => "mc",
            Command::App { .. } => "app",
            Command::Selftest(_) => "selftest",
        }
    }
}

/// Grid-valued keys accept `"0.5,1"` or `[0.5, 1]` in config files.
fn list_or_string<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        List(Vec<f64>),
    }
    Ok(Option::<Raw>::deserialize(d)?.map(|r| match r {
        Raw::Text(s) => s,
        Raw::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
    }))
}

/// Every flag of every subcommand. Config keys are the long flag names.
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// JSON file supplying any of these flags.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Equation id, or a comma separated list for `bound`.
    #[arg(long)]
    #[serde(default)]
    pub eq: Option<String>,
    /// `uniform<K>^<N>`, `bernoulli<p>^<N>` or a JSON space.
    #[arg(long)]
    #[serde(default)]
    pub space: Option<String>,
    /// `all`, `random:<count>`, inline event JSON or a JSON file.
    #[arg(long)]
    #[serde(default)]
    pub events: Option<String>,
    /// Point as `0,1,0` or `[0,1,0]`.
    #[arg(long)]
    #[serde(default)]
    pub point: Option<String>,
    /// hamming, one-sided, penalty, q-point, convex or xi.
    #[arg(long)]
    #[serde(default)]
    pub functional: Option<String>,
    #[arg(long = "t-grid")]
    #[serde(rename = "t-grid", default, deserialize_with = "list_or_string")]
    pub t_grid: Option<String>,
    #[arg(long = "u-grid")]
    #[serde(rename = "u-grid", default, deserialize_with = "list_or_string")]
    pub u_grid: Option<String>,

    #[arg(long = "N", alias = "n")]
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    /// Length of the second word (lcs).
    #[arg(long = "N2")]
    #[serde(rename = "N2", default)]
    pub n2: Option<usize>,
    /// Alphabet size (lcs).
    #[arg(long)]
    #[serde(default)]
    pub alphabet: Option<usize>,
    #[arg(long = "pA")]
    #[serde(rename = "pA", default)]
    pub p_a: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub k: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub t: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub u: Option<f64>,
    /// One value, or a comma separated list.
    #[arg(long)]
    #[serde(default, deserialize_with = "list_or_string")]
    pub alpha: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub q: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub p1: Option<f64>,
    /// Unspecified universal constant of some bounds.
    #[arg(long = "K")]
    #[serde(rename = "K", default)]
    pub big_k: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub q0: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub median: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub scale: Option<f64>,
    /// Coordinate weights of the weighted Hamming distance.
    #[arg(long)]
    #[serde(default, deserialize_with = "list_or_string")]
    pub profile: Option<String>,
    /// Penalty kernel `c 1[i != j]` on the common factor of the space.
    #[arg(long = "kernel-c")]
    #[serde(rename = "kernel-c", default)]
    pub kernel_c: Option<f64>,

    #[arg(long)]
    #[serde(default)]
    pub samples: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to $CONCLAB_WORKERS, then 1.
    #[arg(long)]
    #[serde(default)]
    pub workers: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    #[serde(default)]
    pub format: Option<String>,

    /// supsum: linear, permutation-sigma, permutation-a, q-point;
    /// binpack: exact, ffd, auto.
    #[arg(long)]
    #[serde(default)]
    pub mode: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub beta: Option<f64>,
    /// normal, rademacher or uniform.
    #[arg(long)]
    #[serde(default)]
    pub disorder: Option<String>,
    /// Top-k sizes of the q-point supsum mode.
    #[arg(long)]
    #[serde(default, deserialize_with = "list_or_string")]
    pub ks: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub quantile: Option<f64>,

    /// Reduced sample counts (selftest).
    #[arg(long)]
    #[serde(default)]
    pub quick: bool,
    /// Criteria to run (selftest), e.g. `1,7,9`.
    #[arg(long)]
    #[serde(default, deserialize_with = "list_or_string")]
    pub only: Option<String>,
    #[arg(long = "bound-scale", hide = true)]
    #[serde(rename = "bound-scale", default)]
    pub bound_scale: Option<f64>,
}

macro_rules! each_option {
    ($m:ident) => {
        $m!(
            eq "eq", space "space", events "events", point "point", functional "functional",
            t_grid "t-grid", u_grid "u-grid", n "N", n2 "N2", alphabet "alphabet", p_a "pA",
            k "k", t "t", u "u", alpha "alpha", q "q", p "p", p1 "p1", big_k "K", q0 "q0",
            median "median", scale "scale", profile "profile", kernel_c "kernel-c",
            samples "samples", seed "seed", workers "workers", out "out", format "format",
            mode "mode", beta "beta", disorder "disorder", ks "ks", quantile "quantile",
            only "only", bound_scale "bound-scale"
        )
    };
}

impl Params {
    /// Fills every flag missing here from `file`.
    fn merge(mut self, file: Params) -> Params {
        macro_rules! merge {
            ($($f:ident $name:literal),*) => { $( if self.$f.is_none() { self.$f = file.$f; } )* };
        }
        each_option!(merge);
        self.quick |= file.quick;
        self
    }

    /// Long names of the flags that are set.
    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! present {
            ($($f:ident $name:literal),*) => { $( if self.$f.is_some() { v.push($name); } )* };
        }
        each_option!(present);
        if self.quick {
            v.push("quick");
        }
        v
    }
}

const COMMON: &[&str] = &["seed", "workers", "out", "format"];

/// Flags each subcommand reads besides [`COMMON`].
fn accepted(command: &Command) -> &'static [&'static str] {
    match command {
        Command::Bound(_) => &[
            "eq", "space", "t-grid", "u-grid", "N", "pA", "k", "t", "u", "alpha", "q", "p", "p1",
            "K", "q0", "median", "scale", "profile", "kernel-c",
        ],
        Command::Distance(_) => {
            &["space", "events", "point", "functional", "alpha", "profile", "kernel-c"]
        }
        Command::VerifyExact(_) => &[
            "eq", "space", "events", "t-grid", "u-grid", "N", "alpha", "q", "p1", "profile",
            "kernel-c", "bound-scale",
        ],
        Command::Mc(_) => &[
            "eq", "space", "events", "functional", "u-grid", "alpha", "q", "K", "q0", "profile",
            "kernel-c", "samples",
        ],
        Command::App { .. } => &[
            "N", "N2", "alphabet", "samples", "u-grid", "mode", "beta", "disorder", "ks", "q",
            "quantile",
        ],
        Command::Selftest(_) => &["quick", "only", "bound-scale"],
    }
}

/// A usage or input error, optionally tied to a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub flag: Option<&'static str>,
    pub message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            flag: None,
            message: message.into(),
        }
    }

    pub fn flag(flag: &'static str, message: impl fmt::Display) -> Self {
        Self {
            flag: Some(flag),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flag {
            Some(flag) => write!(f, "--{flag}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl From<conclab_core::Error> for CliError {
    fn from(e: conclab_core::Error) -> Self {
        CliError::new(e.to_string())
    }
}

/// Reads a UTF-8 file of at most [`MAX_INPUT`] bytes.
fn read_limited(path: &Path, flag: &'static str) -> Result<String, CliError> {
    let meta = std::fs::metadata(path).map_err(|e| CliError::flag(flag, format!("{}: {e}", path.display())))?;
    if meta.len() > MAX_INPUT as u64 {
        return Err(CliError::flag(flag, format!("{} is larger than {MAX_INPUT} bytes", path.display())));
    }
    std::fs::read_to_string(path).map_err(|e| CliError::flag(flag, format!("{}: {e}", path.display())))
}

/// Parses a config file body. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<Params, CliError> {
    if text.len() > MAX_INPUT {
        return Err(CliError::flag("config", format!("longer than {MAX_INPUT} bytes")));
    }
    serde_json::from_str(text).map_err(|e| CliError::flag("config", e))
}

/// Command line merged with the config file, checked against the
/// subcommand.
fn resolve(command: &Command, params: &Params) -> Result<Params, CliError> {
    let merged = match &params.config {
        Some(path) => params.clone().merge(parse_config(&read_limited(path, "config")?)?),
        None => params.clone(),
    };
    let allowed = accepted(command);
    if let Some(flag) = merged
        .present()
        .into_iter()
        .find(|f| !allowed.contains(f) && !COMMON.contains(f))
    {
        return Err(CliError {
            flag: Some(flag),
            message: format!("not used by {}", command.name()),
        });
    }
    if let Some(f) = &merged.format {
        if f != "json" && f != "csv" {
            return Err(CliError::flag("format", format!("{f:?} is neither json nor csv")));
        }
    }
    Ok(merged)
}

/// Worker count: the flag, then the environment, then 1.
fn workers(params: &Params) -> Result<usize, CliError> {
    let w = match params.workers {
        Some(w) => w,
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::new(format!("{WORKERS_ENV}={s:?} is not a worker count")))?,
            Err(_) => 1,
        },
    };
    if w == 0 {
        return Err(CliError::flag("workers", "must be at least 1"));
    }
    Ok(w)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let params = match &cli.command {
        Command::Bound(p)
        | Command::Distance(p)
        | Command::VerifyExact(p)
        | Command::Mc(p)
        | Command::Selftest(p) => p,
        Command::App { params, .. } => params,
    };
    let outcome = resolve(&cli.command, params).and_then(|p| {
        let w = workers(&p)?;
        match &cli.command {
            Command::Bound(_) => commands::bound(&p),
            Command::Distance(_) => commands::distance(&p),
            Command::VerifyExact(_) => commands::verify_exact(&p, w),
            Command::Mc(_) => commands::mc(&p, w),
            Command::App { name, .. } => commands::app(*name, &p, w),
            Command::Selftest(_) => commands::selftest(&p, w),
        }
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys() {
        let p = parse_config(r#"{"eq": "2.1.3", "N": 100, "pA": 0.5, "t-grid": [0.5, 1]}"#).unwrap();
        assert_eq!(p.eq.as_deref(), Some("2.1.3"));
        assert_eq!(p.n, Some(100));
        assert_eq!(p.t_grid.as_deref(), Some("0.5,1"));
        assert!(parse_config(r#"{"eq": "2.1.3", "colour": 1}"#).is_err());
        assert!(parse_config(r#"{"config": "x.json"}"#).is_err());
    }

    #[test]
    fn command_line_wins() {
        let cli = Params {
            n: Some(10),
            ..Default::default()
        };
        let file = Params {
            n: Some(20),
            seed: Some(3),
            ..Default::default()
        };
        let m = cli.merge(file);
        assert_eq!((m.n, m.seed), (Some(10), Some(3)));
        assert_eq!(m.present(), vec!["N", "seed"]);
    }
}
