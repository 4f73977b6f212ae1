//! Custom immersions described in TOML.
//!
//! ```toml
//! name = "tilted_sphere"
//! kind = "parametric"      # or "graph": coordinates are (u, X(u))
//! m = 2
//! k = 3
//! euler_char = 2           # optional
//!
//! [[domain]]               # one table per parameter axis
//! min = 0.0
//! max = "pi"               # numbers, or "pi", "2pi", "pi/2", "-pi"
//! periodic = false
//!
//! [[domain]]
//! min = 0.0
//! max = "2pi"
//! periodic = true
//!
//! [[coordinate]]           # k entries (parametric) or k - m entries (graph)
//! terms = [ { coef = 1.0, factors = ["sin(u)", "cos(u)"] } ]
//! ```
//!
//! Each term is `coef` times one factor per axis. A factor is `"1"`, `"u"`,
//! `"u^p"` with p ≥ 0, `"cos(u)"`, `"sin(u)"`, or `"cos(fu)"`/`"sin(fu)"` with
//! an integer frequency f.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use super::{Axis, Factor, Immersion, Shape, Term, TermMap};
use crate::autodiff::MAX_VARS;
use crate::error::{GeomError, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    kind: Option<String>,
    m: Option<i64>,
    k: Option<i64>,
    euler_char: Option<i64>,
    domain: Option<Vec<RawAxis>>,
    coordinate: Option<Vec<RawCoordinate>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    min: Option<RawBound>,
    max: Option<RawBound>,
    #[serde(default)]
    periodic: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBound {
    Num(f64),
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoordinate {
    terms: Option<Vec<RawTerm>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coef: Option<f64>,
    factors: Option<Vec<String>>,
}

fn bound(field: &str, raw: Option<RawBound>) -> Result<f64> {
    match raw {
        None => Err(GeomError::parse(field, "missing")),
        Some(RawBound::Num(x)) => Ok(x),
        Some(RawBound::Int(x)) => Ok(x as f64),
        Some(RawBound::Text(s)) => parse_pi_multiple(&s)
            .ok_or_else(|| GeomError::parse(field, format!("cannot read `{s}` as a bound"))),
    }
}

fn parse_pi_multiple(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, div) = match s.split_once('/') {
        Some((h, d)) => (h.to_string(), d.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let coef = head.strip_suffix("pi")?;
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => coef.strip_suffix('*').unwrap_or(coef).parse::<f64>().ok()?,
    };
    Some(c * PI / div)
}

/// Parses one factor string such as `"u^2"` or `"cos(3u)"`.
pub fn parse_factor(s: &str) -> Option<Factor> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "1" {
        return Some(Factor::One);
    }
    if s == "u" {
        return Some(Factor::Pow(1));
    }
    if let Some(p) = s.strip_prefix("u^") {
        let p: u32 = p.parse().ok()?;
        return Some(if p == 0 { Factor::One } else { Factor::Pow(p) });
    }
    let trig = |prefix: &str| -> Option<i32> {
        let inner = s.strip_prefix(prefix)?.strip_suffix(')')?;
        let f = inner.strip_suffix('u')?;
        match f.strip_suffix('*').unwrap_or(f) {
            "" | "+" => Some(1),
            "-" => Some(-1),
            n => n.parse().ok(),
        }
    };
    if let Some(f) = trig("cos(") {
        return Some(Factor::Cos(f));
    }
    if let Some(f) = trig("sin(") {
        return Some(Factor::Sin(f));
    }
    None
}

fn dimension(field: &str, raw: Option<i64>) -> Result<usize> {
    match raw {
        None => Err(GeomError::parse(field, "missing")),
        Some(v) if v >= 1 => Ok(v as usize),
        Some(v) => Err(GeomError::parse(field, format!("must be ≥ 1, got {v}"))),
    }
}

/// Parses the TOML text of a surface file.
pub fn parse_surface_file(text: &str) -> Result<Immersion> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let span = e
            .span()
            .map(|s| format!(" (bytes {}..{})", s.start, s.end))
            .unwrap_or_default();
        GeomError::parse("<document>", format!("{}{span}", e.message()))
    })?;
    let graph = match raw.kind.as_deref() {
        None | Some("parametric") => false,
        Some("graph") => true,
        Some(other) => {
            return Err(GeomError::parse(
                "kind",
                format!("expected `parametric` or `graph`, got `{other}`"),
            ))
        }
    };
    let m = dimension("m", raw.m)?;
    let k = dimension("k", raw.k)?;
    if k <= m {
        return Err(GeomError::parse(
            "k",
            format!("must exceed m = {m}, got {k}"),
        ));
    }
    if m > MAX_VARS {
        return Err(GeomError::parse(
            "m",
            format!("at most {MAX_VARS} supported"),
        ));
    }
    let raw_domain = raw
        .domain
        .ok_or_else(|| GeomError::parse("domain", "missing"))?;
    if raw_domain.len() != m {
        return Err(GeomError::parse(
            "domain",
            format!("expected {m} axes, got {}", raw_domain.len()),
        ));
    }
    let mut domain = Vec::with_capacity(m);
    for (i, ax) in raw_domain.into_iter().enumerate() {
        let min = bound(&format!("domain[{i}].min"), ax.min)?;
        let max = bound(&format!("domain[{i}].max"), ax.max)?;
        if !(min < max) {
            return Err(GeomError::parse(
                format!("domain[{i}]"),
                format!("need min < max, got [{min}, {max}]"),
            ));
        }
        domain.push(Axis {
            min,
            max,
            periodic: ax.periodic,
        });
    }
    let expected_coords = if graph { k - m } else { k };
    let raw_coords = raw
        .coordinate
        .ok_or_else(|| GeomError::parse("coordinate", "missing"))?;
    if raw_coords.len() != expected_coords {
        return Err(GeomError::parse(
            "coordinate",
            format!(
                "expected {expected_coords} entries, got {}",
                raw_coords.len()
            ),
        ));
    }
    let mut coords = Vec::with_capacity(expected_coords);
    for (c, rc) in raw_coords.into_iter().enumerate() {
        let field = format!("coordinate[{c}].terms");
        let terms = rc
            .terms
            .ok_or_else(|| GeomError::parse(&field, "missing"))?;
        let mut parsed = Vec::with_capacity(terms.len());
        for (t, rt) in terms.into_iter().enumerate() {
            let tf = format!("{field}[{t}]");
            let coef = rt
                .coef
                .ok_or_else(|| GeomError::parse(format!("{tf}.coef"), "missing"))?;
            let factors = rt
                .factors
                .ok_or_else(|| GeomError::parse(format!("{tf}.factors"), "missing"))?;
            if factors.len() != m {
                return Err(GeomError::parse(
                    format!("{tf}.factors"),
                    format!("expected {m} entries, got {}", factors.len()),
                ));
            }
            let factors = factors
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    parse_factor(s).ok_or_else(|| {
                        GeomError::parse(
                            format!("{tf}.factors[{i}]"),
                            format!("unrecognized factor `{s}`"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            parsed.push(Term { coef, factors });
        }
        coords.push(parsed);
    }
    let name = raw.name.unwrap_or_else(|| "custom".to_string());
    Ok(Immersion::new(
        name,
        k,
        domain,
        raw.euler_char,
        Vec::new(),
        Shape::Terms(TermMap { coords, graph }),
    ))
}

pub fn load_surface_file(path: impl AsRef<Path>) -> Result<Immersion> {
    let text = std::fs::read_to_string(path)?;
    parse_surface_file(&text)
}
