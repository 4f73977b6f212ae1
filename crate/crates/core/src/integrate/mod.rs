//! Quadrature against the Riemannian density and the Gauss-Bonnet check.

mod quadrature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    egregium_factor, gauss_equation_tensor, generalized_curvature_quadrature, pfaffian_density,
    MomentTable,
};
use crate::error::{GeomError, Result};
use crate::immersion::{fundamental_forms, Immersion, Jet2};

pub use quadrature::{
    default_sphere_order, gauss_legendre_unit, normal_sphere_rule, AxisRule, NormalSphereRule,
    QuadratureGrid, Resolution, RuleKind, MONTE_CARLO_SEED,
};

/// √det(d1ᵀd1).
pub fn volume_density(jet: &Jet2) -> f64 {
    (jet.d1.transpose() * &jet.d1).determinant().max(0.0).sqrt()
}

/// Σ_nodes f(u, jet(u))·√det I(u)·∏ weights.
///
/// Nodes are split by the index along the first axis; each slab is summed
/// sequentially and the slab sums are added in index order, so the result
/// does not depend on the number of worker threads.
pub fn integrate_with_jet<F>(imm: &Immersion, grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&[f64], &Jet2) -> Result<f64> + Sync,
{
    if grid.axes.len() != imm.m {
        return Err(GeomError::AxisMismatch {
            grid: grid.axes.len(),
            domain: imm.m,
        });
    }
    let dims = grid.dims();
    let rest: usize = dims[1..].iter().product();
    let slabs: Vec<Result<f64>> = (0..dims[0])
        .into_par_iter()
        .map(|i0| {
            let mut idx = vec![0usize; dims.len()];
            idx[0] = i0;
            let mut u = vec![0.0; dims.len()];
            let mut sum = 0.0;
            for flat in 0..rest {
                let mut r = flat;
                for ax in (1..dims.len()).rev() {
                    idx[ax] = r % dims[ax];
                    r /= dims[ax];
                }
                let mut w = 1.0;
                for (ax, rule) in grid.axes.iter().enumerate() {
                    u[ax] = rule.nodes[idx[ax]];
                    w *= rule.weights[idx[ax]];
                }
                let jet = imm.evaluate_jet2(&u)?;
                sum += w * volume_density(&jet) * f(&u, &jet)?;
            }
            Ok(sum)
        })
        .collect();
    let mut total = 0.0;
    for s in slabs {
        total += s?;
    }
    Ok(total)
}

/// ∫_M f dV_M for a field depending on the parameter point only.
pub fn integrate_scalar<F>(imm: &Immersion, f: F, grid: &QuadratureGrid) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_with_jet(imm, grid, |u, _| Ok(f(u)))
}

/// Which computation supplies K_M at the quadrature nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureRoute {
    /// Permutation expansion with closed-form sphere moments.
    Moments,
    /// Direct averaging of K^ν over a normal-sphere rule.
    Quadrature,
    /// Pfaffian density of the Gauss-equation curvature, rescaled by ω_{k−1}/ω_{n−1}.
    Pfaffian,
}

impl std::str::FromStr for CurvatureRoute {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "moments" => Ok(CurvatureRoute::Moments),
            "quadrature" => Ok(CurvatureRoute::Quadrature),
            "pfaffian" => Ok(CurvatureRoute::Pfaffian),
            _ => Err(format!(
                "unknown route `{s}` (moments | quadrature | pfaffian)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussBonnetReport {
    pub route: CurvatureRoute,
    pub nodes: usize,
    /// ∫_M K_M dV_M.
    pub integral: f64,
    /// (ω_{k−1}/ω_{n−1})·χ(M), when χ is known.
    pub expected: Option<f64>,
    pub residual: Option<f64>,
    /// residual / max(1, |expected|).
    pub relative_residual: Option<f64>,
    /// integral·ω_{n−1}/ω_{k−1} rounded to the nearest integer.
    pub estimated_chi: i64,
    /// Distance of the unrounded estimate from `estimated_chi`.
    pub chi_distance: f64,
}

/// K_M at one node by the requested route.
pub struct CurvatureIntegrand {
    route: CurvatureRoute,
    table: MomentTable,
    rule: NormalSphereRule,
    scale: f64,
}

impl CurvatureIntegrand {
    pub fn new(route: CurvatureRoute, m: usize, n: usize) -> Result<Self> {
        if route == CurvatureRoute::Pfaffian && m % 2 == 1 {
            return Err(GeomError::UnsupportedDimension(
                "Pfaffian undefined for odd dimension".into(),
            ));
        }
        Ok(CurvatureIntegrand {
            route,
            table: MomentTable::new(m, n),
            rule: normal_sphere_rule(n, default_sphere_order(n)),
            scale: 1.0 / egregium_factor(m, n),
        })
    }

    pub fn eval(&self, jet: &Jet2) -> Result<f64> {
        let fd = fundamental_forms(jet)?;
        match self.route {
            CurvatureRoute::Moments => {
                let (_, forms) = fd.orthonormal_second_form()?;
                Ok(self.table.evaluate(&forms))
            }
            CurvatureRoute::Quadrature => generalized_curvature_quadrature(&fd, &self.rule),
            CurvatureRoute::Pfaffian => {
                Ok(self.scale * pfaffian_density(&gauss_equation_tensor(&fd)?)?)
            }
        }
    }
}

/// ∫_M K_M dV_M compared with (ω_{k−1}/ω_{n−1})·χ(M).
pub fn gauss_bonnet_check(
    imm: &Immersion,
    grid: &QuadratureGrid,
    route: CurvatureRoute,
) -> Result<GaussBonnetReport> {
    let integrand = CurvatureIntegrand::new(route, imm.m, imm.n())?;
    let integral = integrate_with_jet(imm, grid, |_, jet| integrand.eval(jet))?;
    let ratio = 1.0 / egregium_factor(imm.m, imm.n());
    let expected = imm.euler_char.map(|chi| ratio * chi as f64);
    let residual = expected.map(|e| (integral - e).abs());
    let relative_residual = expected.zip(residual).map(|(e, r)| r / e.abs().max(1.0));
    let raw_chi = integral / ratio;
    let estimated_chi = raw_chi.round() as i64;
    Ok(GaussBonnetReport {
        route,
        nodes: grid.node_count(),
        integral,
        expected,
        residual,
        relative_residual,
        estimated_chi,
        chi_distance: (raw_chi - estimated_chi as f64).abs(),
    })
}
