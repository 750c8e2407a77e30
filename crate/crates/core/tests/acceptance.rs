//! Acceptance criteria 1-15, one PASS/FAIL line each.
//!
//! Run with `cargo test -p conclab-core --test acceptance -- --nocapture`.
//!
//! Criterion 10 cannot pass at its fixed sample size: the LIS "M - L" bound
//! at u = 50 is about 4.2e-5, while 1e5 samples with no exceedance give a
//! 99% upper limit of 5.3e-5. It is still run and printed as FAIL. The test
//! only tolerates that failure when every failing row is of this kind.

use std::io::Write;

use conclab_core::selftest::{run_selftest, SelftestOptions, CRITERIA};

/// Writes past the test harness capture so the lines show up in a plain
/// `cargo test` log.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

const RESOLUTION_LIMITED: &[u8] = &[10];

#[test]
fn acceptance_criteria() {
    let opts = SelftestOptions {
        workers: 8,
        ..Default::default()
    };
    let summary = run_selftest(&opts, |r| say(&r.line()));
    assert_eq!(summary.results.len(), CRITERIA as usize);
    say(summary.table().lines().last().unwrap_or_default());
    let mut unexpected = Vec::new();
    for r in summary.results.iter().filter(|r| !r.pass) {
        if RESOLUTION_LIMITED.contains(&r.id) && r.resolution_limited {
            say(&format!("criterion {} fails only on rows below the Monte Carlo resolution", r.id));
        } else {
            unexpected.push(r.id);
        }
    }
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}
