//! Serialisation of reports. JSON is canonical; CSV is a flat projection of
//! the rows.

use serde::Serialize;

use super::ExactCheckReport;
use crate::error::{Error, Result};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV with one header line and one line per row.
pub fn rows_to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize)]
struct ExactCsvRow<'a> {
    equation: &'a str,
    event: &'a str,
    p_a: f64,
    t: Option<f64>,
    alpha: Option<f64>,
    u: Option<f64>,
    lhs: f64,
    rhs: f64,
    slack: f64,
    counterexample: bool,
}

/// Columns: equation, event, p_a, t, alpha, u, lhs, rhs, slack,
/// counterexample.
pub fn exact_csv(report: &ExactCheckReport) -> Result<String> {
    rows_to_csv(report.rows.iter().map(|r| ExactCsvRow {
        equation: &report.equation,
        event: &r.event,
        p_a: r.p_a,
        t: r.t,
        alpha: r.alpha,
        u: r.u,
        lhs: r.lhs,
        rhs: r.rhs,
        slack: r.slack,
        counterexample: r.is_counterexample(),
    }))
}

/// `<name>_<tag>.json` (or `.csv`), with characters unsafe in file names
/// replaced.
pub fn file_name(name: &str, tag: &str, format: &str) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
            .collect()
    };
    format!("{}_{}.{}", clean(name), clean(tag), clean(format))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::ProductSpace;
    use crate::verify::{sweep_exact, SweepConfig};

    #[test]
    fn csv_projection() {
        let s = ProductSpace::uniform(2, 1).unwrap();
        let mut cfg = SweepConfig::new("2.1.2");
        cfg.t_grid = vec![1.0];
        let r = sweep_exact(&s, &cfg).unwrap();
        let csv = exact_csv(&r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "equation,event,p_a,t,alpha,u,lhs,rhs,slack,counterexample");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2.1.2,0x1,0.5,1.0,,,"));
        let json = to_json(&r).unwrap();
        let back: ExactCheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn names() {
        assert_eq!(file_name("2.1.3", "seed 0", "json"), "2.1.3_seed_0.json");
    }
}
