//! Text formats shared by the CLI and the fuzz targets: space strings,
//! space and event JSON, and numeric grids.
//!
//! * `uniform<K>^<N>`: `{0..K-1}^N` with the uniform measure.
//! * `bernoulli<p>^<N>`: `{0,1}^N` with `P(x_i = 1) = p`.
//! * `{"factors": [[w, ...], ...]}`: one weight vector per coordinate.
//! * events: `{"points": [[i, ...], ...]}`, `{"predicate": "sum-le-2"}`,
//!   `{"predicate": "sum-ge-k", "k": 2}` or
//!   `{"predicate": "singleton", "point": [i, ...]}`; a JSON array holds
//!   several events.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{make_space, Event, Point, Predicate, ProductSpace};

/// Longest input accepted by the parsers, in bytes.
pub const MAX_INPUT: usize = 1 << 20;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn check_len(s: &str) -> Result<()> {
    if s.len() > MAX_INPUT {
        return Err(parse_err(format!("input longer than {MAX_INPUT} bytes")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub factors: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn build(self) -> Result<ProductSpace> {
        make_space(self.factors)
    }
}

pub fn parse_space_json(s: &str) -> Result<ProductSpace> {
    check_len(s)?;
    let f: SpaceFile = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    f.build()
}

/// A space string or a JSON space description.
pub fn parse_space_spec(s: &str) -> Result<ProductSpace> {
    check_len(s)?;
    let s = s.trim();
    if s.starts_with('{') {
        return parse_space_json(s);
    }
    let (base, exp) = s
        .split_once('^')
        .ok_or_else(|| parse_err(format!("space {s:?}: expected <family><param>^<N>")))?;
    let n: usize = exp
        .parse()
        .map_err(|_| parse_err(format!("space {s:?}: bad dimension {exp:?}")))?;
    if n == 0 {
        return Err(Error::InvalidSpace("dimension must be positive".into()));
    }
    if let Some(k) = base.strip_prefix("uniform") {
        let k: usize = k
            .parse()
            .map_err(|_| parse_err(format!("space {s:?}: bad alphabet size {k:?}")))?;
        ProductSpace::uniform(k, n)
    } else if let Some(p) = base.strip_prefix("bernoulli") {
        let p: f64 = p
            .parse()
            .map_err(|_| parse_err(format!("space {s:?}: bad probability {p:?}")))?;
        ProductSpace::bernoulli(p, n)
    } else {
        Err(parse_err(format!("space {s:?}: unknown family")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<usize>>,
}

impl EventSpec {
    pub fn predicate(&self) -> Result<Option<Predicate>> {
        let Some(name) = &self.predicate else {
            return Ok(None);
        };
        let threshold = |rest: &str| -> Result<usize> {
            match (rest, self.k) {
                ("k", Some(k)) => Ok(k),
                ("k", None) => Err(parse_err(format!("predicate {name:?} needs \"k\""))),
                (digits, None) => digits
                    .parse()
                    .map_err(|_| parse_err(format!("predicate {name:?}: bad threshold"))),
                (_, Some(_)) => Err(parse_err(format!("predicate {name:?} has two thresholds"))),
            }
        };
        let p = if let Some(rest) = name.strip_prefix("sum-le-") {
            Predicate::SumLe(threshold(rest)?)
        } else if let Some(rest) = name.strip_prefix("sum-ge-") {
            Predicate::SumGe(threshold(rest)?)
        } else if name == "singleton" {
            let point = self
                .point
                .clone()
                .ok_or_else(|| parse_err("singleton needs \"point\""))?;
            Predicate::Singleton(Point(point))
        } else {
            return Err(parse_err(format!("unknown predicate {name:?}")));
        };
        Ok(Some(p))
    }

    /// Checks the shape without a space.
    pub fn check(&self) -> Result<()> {
        match (&self.points, &self.predicate) {
            (Some(_), None) => {
                if self.k.is_some() || self.point.is_some() {
                    return Err(parse_err("\"k\" and \"point\" belong to predicates"));
                }
                Ok(())
            }
            (None, Some(_)) => self.predicate().map(|_| ()),
            _ => Err(parse_err("event needs exactly one of \"points\" or \"predicate\"")),
        }
    }

    pub fn resolve(&self, space: &ProductSpace) -> Result<Event> {
        self.check()?;
        match self.predicate()? {
            Some(p) => Event::from_predicate(space, &p),
            None => {
                let pts = self.points.clone().unwrap_or_default();
                Event::new(space, pts.into_iter().map(Point).collect())
            }
        }
    }
}

/// One event object or an array of them.
pub fn parse_event_json(s: &str) -> Result<Vec<EventSpec>> {
    check_len(s)?;
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(EventSpec),
        Many(Vec<EventSpec>),
    }
    let specs = match serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))? {
        OneOrMany::One(e) => vec![e],
        OneOrMany::Many(v) => v,
    };
    if specs.is_empty() {
        return Err(parse_err("no events"));
    }
    for e in &specs {
        e.check()?;
    }
    Ok(specs)
}

/// Comma separated finite numbers, e.g. `0.25,0.5,1`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    check_len(s)?;
    let values = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().map_err(|_| parse_err(format!("bad grid value {t:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("grid value {t:?} is not finite")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(parse_err("empty grid"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_strings() {
        let s = parse_space_spec("uniform3^2").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.factor(0).size(), 3);
        let b = parse_space_spec("bernoulli0.3^4").unwrap();
        assert_eq!(b.common_bernoulli(), Some(0.3));
        assert_eq!(b.summary(), "bernoulli0.3^4");
        let j = parse_space_spec(r#"{"factors": [[0.5, 0.5], [0.2, 0.3, 0.5]]}"#).unwrap();
        assert_eq!(j.factor(1).size(), 3);
        for bad in ["", "uniform^2", "uniform2^0", "gauss2^2", "bernoulli1.5^2", "uniform2^x", "{\"factors\": []}"] {
            assert!(parse_space_spec(bad).is_err(), "{bad}");
        }
        assert!(parse_space_json(r#"{"factors": [[1.0]], "extra": 1}"#).is_err());
    }

    #[test]
    fn events() {
        let space = ProductSpace::uniform(2, 3).unwrap();
        let e = parse_event_json(r#"{"points": [[0,0,0],[1,1,1]]}"#).unwrap();
        assert_eq!(e[0].resolve(&space).unwrap().len(), 2);
        let e = parse_event_json(r#"{"predicate": "sum-le-1"}"#).unwrap();
        assert_eq!(e[0].resolve(&space).unwrap().len(), 4);
        let e = parse_event_json(r#"[{"predicate": "sum-ge-k", "k": 3}, {"predicate": "singleton", "point": [1,0,1]}]"#).unwrap();
        assert_eq!(e[0].resolve(&space).unwrap().len(), 1);
        assert_eq!(e[1].resolve(&space).unwrap().points()[0], Point(vec![1, 0, 1]));
        for bad in [
            "{}",
            "[]",
            r#"{"points": [[0]], "predicate": "singleton"}"#,
            r#"{"predicate": "sum-le-k"}"#,
            r#"{"predicate": "median"}"#,
            r#"{"predicate": "singleton"}"#,
            r#"{"points": [[0]], "k": 1}"#,
            r#"{"points": [[0]], "colour": 1}"#,
        ] {
            assert!(parse_event_json(bad).is_err(), "{bad}");
        }
        let wrong_dim = parse_event_json(r#"{"points": [[0, 0]]}"#).unwrap();
        assert!(wrong_dim[0].resolve(&space).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.25, 0.5,1").unwrap(), vec![0.25, 0.5, 1.0]);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1,,2").is_err());
        assert!(parse_grid("inf").is_err());
    }
}
