use std::f64::consts::FRAC_1_SQRT_2;

use crate::autodiff::Real;
use crate::error::{GeomError, Result};
use crate::tube::TubeShape;

/// One per-axis factor of a term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    One,
    /// u^p
    Pow(u32),
    /// cos(f·u)
    Cos(i32),
    /// sin(f·u)
    Sin(i32),
}

impl Factor {
    fn eval<T: Real>(&self, u: T) -> T {
        match *self {
            Factor::One => T::cst(1.0),
            Factor::Pow(p) => u.powi(p as i32),
            Factor::Cos(f) => (u * f as f64).cos(),
            Factor::Sin(f) => (u * f as f64).sin(),
        }
    }
}

/// `coef · ∏_i factor_i(u_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn monomial(coef: f64, exponents: &[u32]) -> Term {
        Term {
            coef,
            factors: exponents
                .iter()
                .map(|&p| if p == 0 { Factor::One } else { Factor::Pow(p) })
                .collect(),
        }
    }

    fn eval<T: Real>(&self, u: &[T]) -> T {
        let mut acc = T::cst(self.coef);
        for (f, &x) in self.factors.iter().zip(u) {
            if *f != Factor::One {
                acc = acc * f.eval(x);
            }
        }
        acc
    }
}

/// Coordinates given as sums of [`Term`]s. A graph map prepends the
/// parameters themselves: u ↦ (u, X(u)).
#[derive(Clone, Debug, PartialEq)]
pub struct TermMap {
    pub coords: Vec<Vec<Term>>,
    pub graph: bool,
}

impl TermMap {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(u.len() + self.coords.len());
        if self.graph {
            out.extend_from_slice(u);
        }
        for terms in &self.coords {
            let mut acc = T::cst(0.0);
            for t in terms {
                acc = acc + t.eval(u);
            }
            out.push(acc);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Circle {
        radius: f64,
    },
    /// Lat-long chart (polar, azimuth).
    Sphere2 {
        radius: f64,
    },
    TorusRev {
        major: f64,
        minor: f64,
    },
    Clifford,
    /// Hyperspherical chart (ψ₁, ψ₂, ψ₃ polar, φ azimuth).
    Sphere4 {
        radius: f64,
    },
    ProductS2S2 {
        r1: f64,
        r2: f64,
    },
    Terms(TermMap),
    Tube(Box<TubeShape>),
}

fn sphere2<T: Real>(r: f64, theta: T, phi: T) -> [T; 3] {
    let st = theta.sin();
    [st * phi.cos() * r, st * phi.sin() * r, theta.cos() * r]
}

impl Shape {
    /// Ambient coordinates; trailing zero coordinates may be omitted.
    pub(crate) fn eval<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        match self {
            Shape::Tube(t) => t.eval(u),
            _ => self.eval_base(u),
        }
    }

    /// [`Shape::eval`] for shapes that are not tubes. Tubes evaluate their
    /// base through this entry point, which keeps the generic instantiation
    /// depth finite.
    pub(crate) fn eval_base<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        Ok(match self {
            Shape::Circle { radius } => vec![u[0].cos() * *radius, u[0].sin() * *radius],
            Shape::Sphere2 { radius } => sphere2(*radius, u[0], u[1]).to_vec(),
            Shape::TorusRev { major, minor } => {
                let (a, v) = (u[0], u[1]);
                let rho = v.cos() * *minor + *major;
                vec![rho * a.cos(), rho * a.sin(), v.sin() * *minor]
            }
            Shape::Clifford => vec![
                u[0].cos() * FRAC_1_SQRT_2,
                u[0].sin() * FRAC_1_SQRT_2,
                u[1].cos() * FRAC_1_SQRT_2,
                u[1].sin() * FRAC_1_SQRT_2,
            ],
            Shape::Sphere4 { radius } => {
                let r = *radius;
                let (s1, s2, s3) = (u[0].sin(), u[1].sin(), u[2].sin());
                let s12 = s1 * s2;
                let s123 = s12 * s3;
                vec![
                    u[0].cos() * r,
                    s1 * u[1].cos() * r,
                    s12 * u[2].cos() * r,
                    s123 * u[3].cos() * r,
                    s123 * u[3].sin() * r,
                ]
            }
            Shape::ProductS2S2 { r1, r2 } => {
                let a = sphere2(*r1, u[0], u[1]);
                let b = sphere2(*r2, u[2], u[3]);
                vec![a[0], a[1], a[2], b[0], b[1], b[2]]
            }
            Shape::Terms(map) => map.eval(u),
            Shape::Tube(_) => {
                return Err(GeomError::UnsupportedDimension(
                    "a tube cannot be the base of another tube".into(),
                ))
            }
        })
    }

    pub(crate) fn reference_curvature(&self, u: &[f64]) -> Option<f64> {
        match self {
            Shape::Circle { .. } | Shape::Clifford => Some(0.0),
            Shape::Sphere2 { radius } => Some(1.0 / (radius * radius)),
            Shape::TorusRev { major, minor } => {
                let c = u[1].cos();
                Some(c / (minor * (major + minor * c)))
            }
            Shape::Sphere4 { radius } => Some(radius.powi(-4)),
            Shape::ProductS2S2 { r1, r2 } => Some(1.0 / (8.0 * r1 * r1 * r2 * r2)),
            Shape::Terms(_) | Shape::Tube(_) => None,
        }
    }

    pub(crate) fn reach_bound(&self) -> Option<f64> {
        match self {
            Shape::Circle { radius } | Shape::Sphere2 { radius } | Shape::Sphere4 { radius } => {
                Some(0.5 * radius)
            }
            Shape::TorusRev { major, minor } => Some(0.5 * minor.min(major - minor)),
            Shape::Clifford => Some(0.5 * FRAC_1_SQRT_2),
            Shape::ProductS2S2 { r1, r2 } => Some(0.5 * r1.min(*r2)),
            Shape::Terms(_) | Shape::Tube(_) => None,
        }
    }
}
