//! Parametrized closed submanifolds of ℝ^k and their pointwise differential
//! data: exact 2-jets, first and second fundamental forms, normal frames.

mod catalog;
mod frame;
mod shape;
pub mod surface_file;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::autodiff::{Real, Tangent, Taylor2, MAX_VARS};
use crate::error::{GeomError, Result};

pub use catalog::{
    catalog_entries, catalog_get, graph_poly, parse_surface, random_graph_poly, CatalogEntry,
};
pub use frame::{fundamental_forms, FrameData};
pub(crate) use frame::{
    normal_frame_with_pivots, orientation_sign, orthonormal_tangents, select_pivots,
};
pub use shape::{Factor, Term};
pub(crate) use shape::{Shape, TermMap};

/// One coordinate axis of a chart domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn interval(min: f64, max: f64) -> Self {
        Axis {
            min,
            max,
            periodic: false,
        }
    }

    pub fn periodic(min: f64, max: f64) -> Self {
        Axis {
            min,
            max,
            periodic: true,
        }
    }

    pub fn angle() -> Self {
        Axis::periodic(0.0, 2.0 * PI)
    }

    pub fn polar() -> Self {
        Axis::interval(0.0, PI)
    }

    pub fn len(&self) -> f64 {
        self.max - self.min
    }
}

/// Point value and exact first/second partial derivatives of a
/// parametrization at one parameter point.
#[derive(Clone, Debug)]
pub struct Jet2 {
    /// Position in ℝ^k.
    pub point: DVector<f64>,
    /// k×m matrix of first partials; column `i` is ∂_i X.
    pub d1: DMatrix<f64>,
    /// One symmetric m×m matrix per ambient coordinate: `d2[a][(i, j)] = ∂_i ∂_j X^a`.
    pub d2: Vec<DMatrix<f64>>,
}

impl Jet2 {
    pub fn k(&self) -> usize {
        self.point.len()
    }

    pub fn m(&self) -> usize {
        self.d1.ncols()
    }

    pub(crate) fn from_taylor(coords: &[Taylor2], m: usize) -> Jet2 {
        let k = coords.len();
        let point = DVector::from_iterator(k, coords.iter().map(|c| c.value()));
        let d1 = DMatrix::from_fn(k, m, |a, i| coords[a].grad(i));
        let d2 = coords
            .iter()
            .map(|c| DMatrix::from_fn(m, m, |i, j| c.hess(i, j)))
            .collect();
        Jet2 { point, d1, d2 }
    }
}

/// A parametrized closed m-dimensional submanifold of ℝ^k.
#[derive(Clone, Debug)]
pub struct Immersion {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub domain: Vec<Axis>,
    /// χ(M) when known.
    pub euler_char: Option<i64>,
    /// Construction parameters, for reporting.
    pub params: Vec<(String, f64)>,
    pub(crate) shape: Shape,
}

impl Immersion {
    pub(crate) fn new(
        name: impl Into<String>,
        k: usize,
        domain: Vec<Axis>,
        euler_char: Option<i64>,
        params: Vec<(String, f64)>,
        shape: Shape,
    ) -> Immersion {
        let m = domain.len();
        assert!(k > m, "ambient dimension must exceed the intrinsic one");
        Immersion {
            name: name.into(),
            m,
            k,
            domain,
            euler_char,
            params,
            shape,
        }
    }

    /// Codimension k − m.
    pub fn n(&self) -> usize {
        self.k - self.m
    }

    /// Same immersion with χ withheld.
    pub fn without_euler_char(mut self) -> Immersion {
        self.euler_char = None;
        self
    }

    /// Wraps periodic axes into their fundamental interval and rejects
    /// coordinates outside non-periodic intervals.
    pub fn wrap(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.m {
            return Err(GeomError::PointArity {
                expected: self.m,
                got: u.len(),
            });
        }
        u.iter()
            .zip(&self.domain)
            .enumerate()
            .map(|(axis, (&x, ax))| {
                if !x.is_finite() {
                    return Err(GeomError::Domain {
                        axis,
                        value: x,
                        min: ax.min,
                        max: ax.max,
                    });
                }
                if ax.periodic {
                    Ok(ax.min + (x - ax.min).rem_euclid(ax.len()))
                } else if x < ax.min || x > ax.max {
                    Err(GeomError::Domain {
                        axis,
                        value: x,
                        min: ax.min,
                        max: ax.max,
                    })
                } else {
                    Ok(x)
                }
            })
            .collect()
    }

    pub(crate) fn eval_generic<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        let mut x = self.shape.eval(u)?;
        x.resize(self.k, T::cst(0.0));
        Ok(x)
    }

    pub(crate) fn eval_base_generic<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        let mut x = self.shape.eval_base(u)?;
        x.resize(self.k, T::cst(0.0));
        Ok(x)
    }

    /// Exact 2-jet of the parametrization at `u`.
    pub fn evaluate_jet2(&self, u: &[f64]) -> Result<Jet2> {
        let u = self.wrap(u)?;
        if self.m > MAX_VARS {
            return Err(GeomError::UnsupportedDimension(format!(
                "jets support at most {MAX_VARS} parameters, `{}` has {}",
                self.name, self.m
            )));
        }
        let vars = Taylor2::variables(&u);
        let x = self.eval_generic(&vars)?;
        Ok(Jet2::from_taylor(&x, self.m))
    }

    /// Position only.
    pub fn evaluate_point(&self, u: &[f64]) -> Result<DVector<f64>> {
        let u = self.wrap(u)?;
        Ok(DVector::from_vec(self.eval_generic(&u)?))
    }

    /// Position and first partials (1-jet), without second derivatives.
    pub fn evaluate_jet1(&self, u: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let u = self.wrap(u)?;
        let vars: Vec<Tangent<f64>> = u
            .iter()
            .enumerate()
            .map(|(i, &x)| Tangent::variable(self.m, i, x))
            .collect();
        let x = self.eval_generic(&vars)?;
        let point = DVector::from_iterator(self.k, x.iter().map(|c| c.v));
        let d1 = DMatrix::from_fn(self.k, self.m, |a, i| x[a].d[i]);
        Ok((point, d1))
    }

    /// First fundamental form from the 1-jet.
    pub fn metric(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let (_, d1) = self.evaluate_jet1(u)?;
        Ok(d1.transpose() * d1)
    }

    /// Jet followed by [`fundamental_forms`].
    pub fn frame(&self, u: &[f64]) -> Result<FrameData> {
        fundamental_forms(&self.evaluate_jet2(u)?)
    }

    /// Closed-form K_M at `u`, for catalog entries where it is known.
    pub fn reference_curvature(&self, u: &[f64]) -> Option<f64> {
        self.shape.reference_curvature(u)
    }

    /// Declared safe tube radius (half the true reach), if known.
    pub fn reach_bound(&self) -> Option<f64> {
        self.shape.reach_bound()
    }

    /// Uniform random parameter point. Non-periodic axes keep a 5% margin
    /// away from their endpoints, where lat-long charts degenerate.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.domain
            .iter()
            .map(|ax| {
                if ax.periodic {
                    ax.min + ax.len() * rng.random::<f64>()
                } else {
                    let margin = 0.05 * ax.len();
                    ax.min + margin + (ax.len() - 2.0 * margin) * rng.random::<f64>()
                }
            })
            .collect()
    }
}
