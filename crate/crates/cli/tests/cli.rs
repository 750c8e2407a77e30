use std::fs;
use std::path::Path;

use conclab_cli::run;

fn conclab(args: &[&str]) -> i32 {
    run(std::iter::once("conclab").chain(args.iter().copied()))
}

/// Runs with `--out <dir>/<name>` and returns (exit code, file contents).
fn conclab_out(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let path_s = path.to_str().unwrap().to_string();
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", &path_s]);
    let code = conclab(&all);
    (code, fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn bound_json_line() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = conclab_out(dir.path(), "b.json", &["bound", "--eq", "2.1.3", "--N", "100", "--pA", "0.5", "--k", "20"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["equation"], "2.1.3");
    assert!((v["value"].as_f64().unwrap() - 0.0366313).abs() < 1e-7);
}

#[test]
fn bound_grids_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = conclab_out(
        dir.path(),
        "b.csv",
        &["bound", "--eq", "2.1.2,2.2.6", "--N", "3", "--pA", "0.5", "--t-grid", "0.5,1", "--format", "csv"],
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("equation,value"));
    assert!(lines[1].starts_with("2.1.2,"));
    assert!(lines[4].starts_with("2.2.6,"));
}

#[test]
fn verify_exact_passes_and_fails() {
    assert_eq!(conclab(&["verify-exact", "--eq", "4.1.2", "--space", "uniform2^3", "--events", "all", "--seed", "0", "--out", "/dev/null"]), 0);
    // negative control: shrunken right-hand sides must produce counterexamples
    assert_eq!(
        conclab(&["verify-exact", "--eq", "4.1.2", "--space", "uniform2^3", "--bound-scale", "0.5", "--out", "/dev/null"]),
        1
    );
    assert_eq!(conclab(&["verify-exact", "--eq", "5.2", "--N", "4", "--events", "random:30", "--out", "/dev/null"]), 0);
}

#[test]
fn verify_exact_explicit_events() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("events.json");
    fs::write(&ev, r#"[{"predicate": "sum-le-1"}, {"points": [[1, 1, 1]]}]"#).unwrap();
    let (code, out) = conclab_out(
        dir.path(),
        "r.json",
        &["verify-exact", "--eq", "2.1.2", "--space", "uniform2^3", "--events", ev.to_str().unwrap(), "--t-grid", "0.5"],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["events"], 2);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn app_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["app", "lis", "--N", "1000", "--samples", "2000", "--seed", "7", "--u-grid", "10,20,30"];
    let (c1, a) = conclab_out(dir.path(), "a.json", &args);
    let (c2, b) = conclab_out(dir.path(), "b.json", &args);
    let mut two = args.to_vec();
    two.extend(["--workers", "2"]);
    let (c3, c) = conclab_out(dir.path(), "c.json", &two);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["app"], "lis");
    assert_eq!(v["seed"], 7);
}

#[test]
fn app_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = conclab_out(
        dir.path(),
        "s.csv",
        &["app", "supsum", "--N", "100", "--samples", "2000", "--u-grid", "1,2", "--format", "csv"],
    );
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("app,label,equation,u"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn mc_against_tail_bound() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = conclab_out(
        dir.path(),
        "m.json",
        &[
            "mc", "--eq", "2.1.3", "--space", "bernoulli0.5^12", "--events", r#"{"predicate": "sum-le-4"}"#,
            "--u-grid", "1,2,3,4", "--samples", "4000",
        ],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["comparison"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn distance_values() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = conclab_out(
        dir.path(),
        "d.json",
        &["distance", "--space", "uniform2^4", "--events", r#"{"points": [[0,0,0,0]]}"#, "--point", "1,1,0,1", "--functional", "convex"],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-9);
    let (code, out) = conclab_out(
        dir.path(),
        "h.json",
        &["distance", "--space", "uniform2^4", "--events", r#"{"points": [[0,0,0,0]]}"#, "--point", "[1,1,0,1]"],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"].as_f64(), Some(3.0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(conclab(&[]), 2);
    assert_eq!(conclab(&["frobnicate"]), 2);
    assert_eq!(conclab(&["bound", "--eq", "2.1.3", "--colour", "red"]), 2);
    assert_eq!(conclab(&["bound", "--eq", "9.9.9", "--N", "3"]), 2);
    assert_eq!(conclab(&["bound", "--eq", "2.1.3", "--samples", "10"]), 2);
    assert_eq!(conclab(&["verify-exact", "--eq", "4.1.2", "--space", "gauss^3"]), 2);
    assert_eq!(conclab(&["verify-exact", "--eq", "4.1.2", "--space", "uniform2^3", "--format", "xml"]), 2);
    assert_eq!(conclab(&["app", "lis", "--beta", "0.5"]), 2);
    assert_eq!(conclab(&["app", "spin", "--beta", "2", "--samples", "10"]), 2);
    assert_eq!(conclab(&["mc", "--space", "uniform2^3", "--events", "{}", "--u-grid", "1"]), 2);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"eq": "2.1.3", "N": 100, "pA": 0.5, "k": 10}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let (code, out) = conclab_out(dir.path(), "o.json", &["bound", "--config", cfg_s, "--k", "20"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["params"]["k"], 20.0);
    assert!((v["value"].as_f64().unwrap() - 0.0366313).abs() < 1e-7);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"eq": "2.1.3", "unknown": 1}"#).unwrap();
    assert_eq!(conclab(&["bound", "--config", bad.to_str().unwrap()]), 2);
    assert_eq!(conclab(&["bound", "--config", dir.path().join("missing.json").to_str().unwrap()]), 2);
}

#[test]
fn selftest_subset_and_fault_hook() {
    assert_eq!(conclab(&["selftest", "--quick", "--only", "1,9", "--out", "/dev/null"]), 0);
    assert_eq!(conclab(&["selftest", "--quick", "--only", "1", "--bound-scale", "0.5", "--out", "/dev/null"]), 1);
    assert_eq!(conclab(&["selftest", "--only", "16"]), 2);
}

#[test]
fn selftest_quick_passes() {
    assert_eq!(conclab(&["selftest", "--quick", "--out", "/dev/null"]), 0);
}

#[test]
fn config_fuzz_seeds_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/parse_run_config");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        conclab_cli::parse_config(&text).unwrap();
        n += 1;
    }
    assert!(n >= 3);
}
