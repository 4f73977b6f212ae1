//! Generalized Gaussian curvature of closed submanifolds M^m ⊂ ℝ^k in any
//! codimension n = k − m.
//!
//! K_M(p) averages the directional curvature det(Π^ν)/det(I) over the unit
//! normal sphere at p. The crate evaluates it from exact 2-jets of
//! parametrized immersions, integrates it over M, and checks it against the
//! Euler characteristic, the Pfaffian of the intrinsic curvature and the
//! Gauss map of a thin tube around M.

pub mod autodiff;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod immersion;
pub mod integrate;
pub mod linalg;
pub mod tube;

pub use error::{GeomError, Result};
