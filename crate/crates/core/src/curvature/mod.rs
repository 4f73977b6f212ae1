//! Directional curvature K^ν, the generalized Gaussian curvature K_M by two
//! independent routes, and the intrinsic comparison with the Pfaffian of the
//! curvature forms.

mod riemann;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::immersion::{FrameData, Immersion};
use crate::integrate::{default_sphere_order, normal_sphere_rule, NormalSphereRule};
use crate::linalg;

pub use riemann::{
    gauss_equation_tensor, intrinsic_curvature_fd, pfaffian_density, CurvatureTensor,
};

/// Unit normal given by its coordinates in a [`FrameData::normal_frame`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormalDirection {
    coeffs: Vec<f64>,
}

impl NormalDirection {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if coeffs.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(GeomError::BadParameter {
                name: "normal direction".into(),
                msg: format!("coefficients must have unit norm, got {norm}"),
            });
        }
        Ok(NormalDirection { coeffs })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(GeomError::BadParameter {
                name: "normal direction".into(),
                msg: "zero vector".into(),
            });
        }
        Ok(NormalDirection {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn negated(&self) -> Self {
        NormalDirection {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// K^ν = det(Π^ν) / det(I).
pub fn directional_curvature(fd: &FrameData, nu: &NormalDirection) -> f64 {
    fd.second_form_along(nu.coeffs()).determinant() / fd.metric.determinant()
}

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ω_d = 2π^{(d+1)/2} / Γ((d+1)/2), the volume of the unit d-sphere (ω₀ = 2).
pub fn sphere_volume(d: usize) -> f64 {
    let h = 0.5 * (d as f64 + 1.0);
    (std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)).exp()
}

/// ∫_{S^{n−1}} ν₁^{2a₁}⋯ν_n^{2a_n} dV = 2∏Γ(a_i + ½) / Γ(n/2 + Σa_i), with
/// n = `a.len()`. Evaluated in log space.
///
/// With Σa_i = m/2 and k = m + n the denominator is Γ(k/2).
pub fn sphere_moment(a: &[u32]) -> f64 {
    assert!(!a.is_empty(), "sphere moments need n ≥ 1");
    let total: u32 = a.iter().sum();
    let num: f64 = a.iter().map(|&ai| ln_gamma(ai as f64 + 0.5)).sum();
    let den = ln_gamma(0.5 * a.len() as f64 + total as f64);
    (std::f64::consts::LN_2 + num - den).exp()
}

/// Precomputed permutations and normal-sphere moments for the moment route
/// in fixed (m, n).
#[derive(Clone, Debug)]
pub struct MomentTable {
    m: usize,
    n: usize,
    perms: Vec<(Vec<usize>, f64)>,
    /// (α, ∫ν_{α₁}⋯ν_{α_m}) for every index tuple with a nonzero moment.
    alphas: Vec<(Vec<usize>, f64)>,
    omega: f64,
}

impl MomentTable {
    pub fn new(m: usize, n: usize) -> Self {
        let mut alphas = Vec::new();
        if m % 2 == 0 {
            let total = n.pow(m as u32);
            for code in 0..total {
                let mut alpha = Vec::with_capacity(m);
                let mut c = code;
                for _ in 0..m {
                    alpha.push(c % n);
                    c /= n;
                }
                let mut counts = vec![0u32; n];
                for &a in &alpha {
                    counts[a] += 1;
                }
                if counts.iter().all(|c| c % 2 == 0) {
                    let half: Vec<u32> = counts.iter().map(|c| c / 2).collect();
                    alphas.push((alpha, sphere_moment(&half)));
                }
            }
        }
        MomentTable {
            m,
            n,
            perms: linalg::signed_permutations(m),
            alphas,
            omega: sphere_volume(n - 1),
        }
    }

    /// Moment-route K_M from second fundamental forms already expressed in an
    /// orthonormal tangent basis.
    pub fn evaluate(&self, ortho_forms: &[DMatrix<f64>]) -> f64 {
        debug_assert_eq!(ortho_forms.len(), self.n);
        if self.m % 2 == 1 {
            return 0.0;
        }
        let mut total = 0.0;
        for (sigma, sign) in &self.perms {
            for (alpha, moment) in &self.alphas {
                let mut prod = *sign * moment;
                for (t, (&a, &s)) in alpha.iter().zip(sigma).enumerate() {
                    prod *= ortho_forms[a][(t, s)];
                }
                total += prod;
            }
        }
        total / self.omega
    }
}

/// K_M = (1/ω_{n−1}) Σ_σ Σ_α (−1)^σ ∏_t Π^{α_t}_{t,σ(t)} ∫ν_{α₁}⋯ν_{α_m},
/// with Π in the Cholesky-whitened orthonormal tangent basis. Exactly 0 for
/// odd m.
pub fn generalized_curvature_moments(fd: &FrameData) -> Result<f64> {
    if fd.m() % 2 == 1 {
        return Ok(0.0);
    }
    let (_, forms) = fd.orthonormal_second_form()?;
    Ok(MomentTable::new(fd.m(), fd.n()).evaluate(&forms))
}

/// K_M = (1/ω_{n−1}) Σ_q w_q K^{ν_q} over a normal-sphere rule.
pub fn generalized_curvature_quadrature(fd: &FrameData, rule: &NormalSphereRule) -> Result<f64> {
    if rule.dim != fd.n() {
        return Err(GeomError::SchemeMismatch {
            rule_dim_minus_one: rule.dim.saturating_sub(1),
            codim: fd.n(),
        });
    }
    let det_metric = fd.metric.determinant();
    let total: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(nu, w)| w * fd.second_form_along(nu).determinant())
        .sum();
    Ok(total / (det_metric * sphere_volume(fd.n() - 1)))
}

/// Pointwise comparison of the curvature routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub m: usize,
    pub n: usize,
    pub k_moments: f64,
    pub k_quadrature: f64,
    /// Coefficient of dV in Pff(−Ω/2π); `None` for odd m.
    pub pfaffian_density: Option<f64>,
    /// (ω_{n−1}/ω_{k−1})·k_moments.
    pub egregium_lhs: f64,
    pub residual_moments_quadrature: f64,
    /// |egregium_lhs − pfaffian_density|.
    pub residual_egregium: Option<f64>,
    /// |(ω_{n−1}/ω_{k−1})·k_quadrature − pfaffian_density|.
    pub residual_quadrature_pfaffian: Option<f64>,
}

impl CurvatureReport {
    pub fn max_residual(&self) -> f64 {
        [
            Some(self.residual_moments_quadrature),
            self.residual_egregium,
            self.residual_quadrature_pfaffian,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

/// ω_{n−1}/ω_{k−1}.
pub fn egregium_factor(m: usize, n: usize) -> f64 {
    sphere_volume(n - 1) / sphere_volume(m + n - 1)
}

/// Every curvature route at one point; the Pfaffian fields are filled for
/// even m only.
pub fn curvature_report(imm: &Immersion, u: &[f64]) -> Result<CurvatureReport> {
    let fd = imm.frame(u)?;
    let (m, n) = (fd.m(), fd.n());
    let k_moments = generalized_curvature_moments(&fd)?;
    let rule = normal_sphere_rule(n, default_sphere_order(n));
    let k_quadrature = generalized_curvature_quadrature(&fd, &rule)?;
    let factor = egregium_factor(m, n);
    let egregium_lhs = factor * k_moments;
    let pfaffian = if m % 2 == 0 {
        Some(pfaffian_density(&gauss_equation_tensor(&fd)?)?)
    } else {
        None
    };
    Ok(CurvatureReport {
        m,
        n,
        k_moments,
        k_quadrature,
        pfaffian_density: pfaffian,
        egregium_lhs,
        residual_moments_quadrature: (k_moments - k_quadrature).abs(),
        residual_egregium: pfaffian.map(|p| (egregium_lhs - p).abs()),
        residual_quadrature_pfaffian: pfaffian.map(|p| (factor * k_quadrature - p).abs()),
    })
}

/// [`curvature_report`] for even m; odd m is rejected.
pub fn egregium_report(imm: &Immersion, u: &[f64]) -> Result<CurvatureReport> {
    if imm.m % 2 == 1 {
        return Err(GeomError::UnsupportedDimension(
            "Pfaffian undefined for odd dimension".into(),
        ));
    }
    curvature_report(imm, u)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::immersion::catalog_get;

    fn outward(fd: &FrameData, point: &[f64]) -> NormalDirection {
        // Coefficients of the unit radial vector in the normal frame.
        let r = nalgebra::DVector::from_column_slice(point).normalize();
        NormalDirection::normalized((fd.normal_frame.transpose() * r).iter().copied().collect())
            .unwrap()
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(0) - 2.0).abs() < 1e-15);
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((sphere_volume(5) - PI.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn sphere_moments() {
        assert!((sphere_moment(&[0, 0, 0]) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_moment(&[1, 0]) - PI).abs() < 1e-14);
        assert!((sphere_moment(&[1, 1]) - PI / 4.0).abs() < 1e-15);
        assert!((sphere_moment(&[0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_sphere_directional_curvature() {
        let s = catalog_get("sphere2_r3").unwrap();
        let u = [1.1, 0.4];
        let fd = s.frame(&u).unwrap();
        let p: Vec<f64> = s.evaluate_point(&u).unwrap().iter().copied().collect();
        let nu = outward(&fd, &p);
        assert!((directional_curvature(&fd, &nu) - 1.0).abs() < 1e-14);
        assert!((directional_curvature(&fd, &nu.negated()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere2_r4_directional_curvatures() {
        let s = catalog_get("sphere2_r4").unwrap();
        let u = [0.8, 2.5];
        let fd = s.frame(&u).unwrap();
        let p = s.evaluate_point(&u).unwrap();
        let radial = (fd.normal_frame.transpose() * p.normalize())
            .iter()
            .copied()
            .collect::<Vec<_>>();
        let e4 = fd.normal_frame.row(3).iter().copied().collect::<Vec<_>>();
        let e4dir = NormalDirection::normalized(e4.clone()).unwrap();
        assert!(directional_curvature(&fd, &e4dir).abs() < 1e-15);
        for alpha in [0.0, 0.3, 1.0, FRAC_PI_2, 2.5] {
            let c: Vec<f64> = radial
                .iter()
                .zip(&e4)
                .map(|(r, e)| alpha.cos() * r + alpha.sin() * e)
                .collect();
            let nu = NormalDirection::new(c).unwrap();
            let want = alpha.cos().powi(2);
            assert!(
                (directional_curvature(&fd, &nu) - want).abs() < 1e-14,
                "α = {alpha}"
            );
        }
    }

    #[test]
    fn normal_direction_must_be_unit() {
        assert!(NormalDirection::new(vec![1.0, 1.0]).is_err());
        assert!(NormalDirection::new(vec![]).is_err());
        assert!(NormalDirection::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn generalized_curvature_examples() {
        let cases = [
            ("sphere2_r3", vec![1.0, 2.0], 1.0),
            ("sphere2_r4", vec![1.0, 1.0], 0.5),
            ("clifford_torus_r4", vec![0.2, 1.1], 0.0),
            ("product_s2s2_r6", vec![0.9, 0.1, 2.0, 4.0], 0.125),
            ("sphere4_r5", vec![0.5, 1.0, 2.0, 3.0], 1.0),
        ];
        for (name, u, want) in cases {
            let imm = catalog_get(name).unwrap();
            let fd = imm.frame(&u).unwrap();
            let km = generalized_curvature_moments(&fd).unwrap();
            let rule = normal_sphere_rule(fd.n(), default_sphere_order(fd.n()));
            let kq = generalized_curvature_quadrature(&fd, &rule).unwrap();
            assert!((km - want).abs() < 1e-12, "{name}: moments {km}");
            assert!((kq - want).abs() < 1e-12, "{name}: quadrature {kq}");
        }
    }

    #[test]
    fn odd_dimension_vanishes() {
        let c = catalog_get("circle_r3").unwrap();
        let fd = c.frame(&[0.3]).unwrap();
        assert_eq!(generalized_curvature_moments(&fd).unwrap(), 0.0);
        let rule = normal_sphere_rule(2, 64);
        assert!(generalized_curvature_quadrature(&fd, &rule).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rule_dimension_must_match() {
        let s = catalog_get("sphere2_r4").unwrap();
        let fd = s.frame(&[1.0, 1.0]).unwrap();
        let rule = normal_sphere_rule(3, 8);
        assert!(matches!(
            generalized_curvature_quadrature(&fd, &rule),
            Err(GeomError::SchemeMismatch { codim: 2, .. })
        ));
    }

    #[test]
    fn egregium_on_spheres() {
        let s = catalog_get("sphere2_r3").unwrap();
        let rep = egregium_report(&s, &[0.7, 5.0]).unwrap();
        assert!((rep.egregium_lhs - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!(rep.residual_egregium.unwrap() < 1e-10);

        let p = catalog_get("product_s2s2_r6").unwrap();
        let rep = egregium_report(&p, &[0.7, 5.0, 2.2, 1.0]).unwrap();
        assert!((rep.egregium_lhs - 1.0 / (4.0 * PI * PI)).abs() < 1e-14);
        assert!(rep.residual_egregium.unwrap() < 1e-10);
    }

    #[test]
    fn egregium_rejects_odd_dimension() {
        let c = catalog_get("circle_r2").unwrap();
        let err = egregium_report(&c, &[0.1]).unwrap_err();
        assert_eq!(err.to_string(), "Pfaffian undefined for odd dimension");
    }
}
