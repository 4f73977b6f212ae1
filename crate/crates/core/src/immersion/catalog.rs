//! Named immersions with known topology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Axis, Immersion, Shape, Term, TermMap};
use crate::autodiff::MAX_VARS;
use crate::error::{GeomError, Result};

/// Listing row for `catalog`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub chi: Option<i64>,
}

const NAMES: &[&str] = &[
    "circle_r2",
    "circle_r3",
    "sphere2_r3",
    "sphere2_r4",
    "torus_rev_r3",
    "clifford_torus_r4",
    "sphere4_r5",
    "product_s2s2_r6",
    "graph_poly",
];

pub fn catalog_entries() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .map(|name| {
            let imm = catalog_get(name).expect("catalog defaults are valid");
            CatalogEntry {
                name: name.to_string(),
                m: imm.m,
                k: imm.k,
                n: imm.n(),
                chi: imm.euler_char,
            }
        })
        .collect()
}

/// Catalog entry with default parameters.
pub fn catalog_get(name: &str) -> Result<Immersion> {
    build(name, &[])
}

/// Parses `name` or `name:key=value,key=value`, e.g. `torus_rev_r3:R=3,r=1`.
pub fn parse_surface(text: &str) -> Result<Immersion> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (text.trim(), ""),
    };
    let mut params = Vec::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = kv.split_once('=').ok_or_else(|| GeomError::BadParameter {
            name: name.into(),
            msg: format!("expected key=value, got `{kv}`"),
        })?;
        let value: f64 = value.trim().parse().map_err(|_| GeomError::BadParameter {
            name: name.into(),
            msg: format!("`{}` is not a number", value.trim()),
        })?;
        params.push((key.trim().to_string(), value));
    }
    build(name, &params)
}

struct Params<'a> {
    name: &'a str,
    given: &'a [(String, f64)],
    used: Vec<(String, f64)>,
}

impl Params<'_> {
    fn get(&mut self, key: &str, default: f64) -> f64 {
        let v = self
            .given
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map_or(default, |(_, v)| *v);
        self.used.push((key.to_string(), v));
        v
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(GeomError::BadParameter {
                name: self.name.into(),
                msg: format!("{key} must be positive, got {v}"),
            })
        }
    }

    fn count(&mut self, key: &str, default: usize, max: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v >= 1.0 && v <= max as f64 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(GeomError::BadParameter {
                name: self.name.into(),
                msg: format!("{key} must be an integer in 1..={max}, got {v}"),
            })
        }
    }

    fn finish(self) -> Result<Vec<(String, f64)>> {
        if let Some((k, _)) = self
            .given
            .iter()
            .find(|(k, _)| !self.used.iter().any(|(u, _)| u == k))
        {
            return Err(GeomError::BadParameter {
                name: self.name.into(),
                msg: format!("unknown parameter `{k}`"),
            });
        }
        Ok(self.used)
    }
}

fn build(name: &str, given: &[(String, f64)]) -> Result<Immersion> {
    let mut p = Params {
        name,
        given,
        used: Vec::new(),
    };
    let (k, domain, chi, shape) = match name {
        "circle_r2" | "circle_r3" => {
            let radius = p.positive("r", 1.0)?;
            let k = if name == "circle_r2" { 2 } else { 3 };
            (k, vec![Axis::angle()], Some(0), Shape::Circle { radius })
        }
        "sphere2_r3" | "sphere2_r4" => {
            let radius = p.positive("R", 1.0)?;
            let k = if name == "sphere2_r3" { 3 } else { 4 };
            (
                k,
                vec![Axis::polar(), Axis::angle()],
                Some(2),
                Shape::Sphere2 { radius },
            )
        }
        "torus_rev_r3" => {
            let major = p.positive("R", 2.0)?;
            let minor = p.positive("r", 0.5)?;
            if minor >= major {
                return Err(GeomError::BadParameter {
                    name: name.into(),
                    msg: format!("need r < R, got r = {minor}, R = {major}"),
                });
            }
            (
                3,
                vec![Axis::angle(), Axis::angle()],
                Some(0),
                Shape::TorusRev { major, minor },
            )
        }
        "clifford_torus_r4" => (
            4,
            vec![Axis::angle(), Axis::angle()],
            Some(0),
            Shape::Clifford,
        ),
        "sphere4_r5" => {
            let radius = p.positive("R", 1.0)?;
            (
                5,
                vec![Axis::polar(), Axis::polar(), Axis::polar(), Axis::angle()],
                Some(2),
                Shape::Sphere4 { radius },
            )
        }
        "product_s2s2_r6" => {
            let r1 = p.positive("r1", 1.0)?;
            let r2 = p.positive("r2", 1.0)?;
            (
                6,
                vec![Axis::polar(), Axis::angle(), Axis::polar(), Axis::angle()],
                Some(4),
                Shape::ProductS2S2 { r1, r2 },
            )
        }
        "graph_poly" => {
            let m = p.count("m", 2, MAX_VARS)?;
            let n = p.count("n", 2, 16)?;
            let degree = p.count("degree", 3, 8)?;
            let seed = p.get("seed", 0.0);
            let scale = p.positive("scale", 0.5)?;
            let params = p.finish()?;
            let mut imm = random_graph_poly(m, n, degree as u32, seed as u64, scale)?;
            imm.params = params;
            return Ok(imm);
        }
        _ => return Err(GeomError::UnknownImmersion(name.to_string())),
    };
    let params = p.finish()?;
    Ok(Immersion::new(name, k, domain, chi, params, shape))
}

/// Graph of a polynomial map ℝ^m → ℝ^n over the box [−1, 1]^m.
/// `components[c]` lists the terms of the c-th component; χ is unknown.
pub fn graph_poly(m: usize, n: usize, components: Vec<Vec<Term>>) -> Result<Immersion> {
    if m == 0 || m > MAX_VARS {
        return Err(GeomError::BadParameter {
            name: "graph_poly".into(),
            msg: format!("m must be in 1..={MAX_VARS}"),
        });
    }
    if n == 0 || components.len() != n {
        return Err(GeomError::BadParameter {
            name: "graph_poly".into(),
            msg: format!("expected {n} components, got {}", components.len()),
        });
    }
    if let Some(t) = components.iter().flatten().find(|t| t.factors.len() != m) {
        return Err(GeomError::BadParameter {
            name: "graph_poly".into(),
            msg: format!("term has {} factors, expected {m}", t.factors.len()),
        });
    }
    let map = TermMap {
        coords: components,
        graph: true,
    };
    Ok(Immersion::new(
        "graph_poly",
        m + n,
        vec![Axis::interval(-1.0, 1.0); m],
        None,
        vec![("m".into(), m as f64), ("n".into(), n as f64)],
        Shape::Terms(map),
    ))
}

fn exponent_vectors(m: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(m, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, degree, &mut Vec::new(), &mut out);
    out.retain(|e| e.iter().sum::<u32>() >= 1);
    out
}

/// Polynomial graph with every monomial of total degree 1..=degree and
/// coefficients uniform in [−scale, scale], deterministic in `seed`.
pub fn random_graph_poly(
    m: usize,
    n: usize,
    degree: u32,
    seed: u64,
    scale: f64,
) -> Result<Immersion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monomials = exponent_vectors(m, degree);
    let components = (0..n)
        .map(|_| {
            monomials
                .iter()
                .map(|e| Term::monomial(rng.random_range(-scale..=scale), e))
                .collect()
        })
        .collect();
    graph_poly(m, n, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_dimensions_and_euler_characteristics() {
        let expect = [
            ("circle_r2", 1, 2, Some(0)),
            ("circle_r3", 1, 3, Some(0)),
            ("sphere2_r3", 2, 3, Some(2)),
            ("sphere2_r4", 2, 4, Some(2)),
            ("torus_rev_r3", 2, 3, Some(0)),
            ("clifford_torus_r4", 2, 4, Some(0)),
            ("sphere4_r5", 4, 5, Some(2)),
            ("product_s2s2_r6", 4, 6, Some(4)),
            ("graph_poly", 2, 4, None),
        ];
        for (name, m, k, chi) in expect {
            let imm = catalog_get(name).unwrap();
            assert_eq!((imm.m, imm.k, imm.euler_char), (m, k, chi), "{name}");
        }
        assert_eq!(catalog_entries().len(), expect.len());
    }

    #[test]
    fn unknown_name_is_a_lookup_error() {
        assert!(matches!(
            catalog_get("klein_bottle"),
            Err(GeomError::UnknownImmersion(_))
        ));
    }

    #[test]
    fn parameters_are_parsed_and_validated() {
        let t = parse_surface("torus_rev_r3:R=3, r=1").unwrap();
        assert_eq!(t.params, vec![("R".into(), 3.0), ("r".into(), 1.0)]);
        assert!(parse_surface("torus_rev_r3:R=1,r=2").is_err());
        assert!(parse_surface("sphere2_r3:R=-1").is_err());
        assert!(parse_surface("sphere2_r3:Q=1").is_err());
        assert!(parse_surface("sphere2_r3:R").is_err());
        let g = parse_surface("graph_poly:m=3,n=1,seed=4").unwrap();
        assert_eq!((g.m, g.k), (3, 4));
    }

    #[test]
    fn random_graphs_are_seeded() {
        let a = random_graph_poly(2, 2, 3, 11, 0.5).unwrap();
        let b = random_graph_poly(2, 2, 3, 11, 0.5).unwrap();
        let c = random_graph_poly(2, 2, 3, 12, 0.5).unwrap();
        let u = [0.3, -0.2];
        assert_eq!(a.evaluate_point(&u).unwrap(), b.evaluate_point(&u).unwrap());
        assert_ne!(a.evaluate_point(&u).unwrap(), c.evaluate_point(&u).unwrap());
        // Degree ≤ 3 in two variables: 9 monomials of positive degree.
        assert_eq!(exponent_vectors(2, 3).len(), 9);
    }
}
