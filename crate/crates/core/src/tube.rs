//! The boundary ∂N of an ε-tube around a submanifold, built as a hypersurface
//! immersion F(x, y) = X(x) + ε Σ_s y_s ν_s(x), and the pointwise identities
//! relating its curvature to that of the base.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Real, Tangent, MAX_VARS};
use crate::curvature::{directional_curvature, sphere_volume, NormalDirection};
use crate::error::{GeomError, Result};
use crate::immersion::{
    fundamental_forms, normal_frame_with_pivots, orientation_sign, orthonormal_tangents,
    select_pivots, Axis, FrameData, Immersion, Shape,
};
use crate::integrate::{integrate_with_jet, QuadratureGrid, Resolution};
use crate::linalg;

/// Base immersion and tube radius.
#[derive(Clone, Debug)]
pub struct TubeConfig {
    pub base: Immersion,
    pub eps: f64,
}

impl TubeConfig {
    /// Checks 0 < ε ≤ declared reach bound and codimension 1..=3.
    pub fn new(base: Immersion, eps: f64) -> Result<Self> {
        if matches!(base.shape, Shape::Tube(_)) {
            return Err(GeomError::UnsupportedDimension(
                "a tube cannot be the base of another tube".into(),
            ));
        }
        let n = base.n();
        if !(1..=3).contains(&n) {
            return Err(GeomError::UnsupportedDimension(format!(
                "tubes are built for codimension 1, 2 or 3, got {n}"
            )));
        }
        if base.k - 1 > MAX_VARS {
            return Err(GeomError::UnsupportedDimension(format!(
                "tube of `{}` needs {} parameters, at most {MAX_VARS} supported",
                base.name,
                base.k - 1
            )));
        }
        let bound = base.reach_bound().ok_or_else(|| GeomError::BadParameter {
            name: base.name.clone(),
            msg: "no declared reach bound; tubes are unsupported".into(),
        })?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(GeomError::BadParameter {
                name: base.name.clone(),
                msg: format!("eps must be positive, got {eps}"),
            });
        }
        if eps > bound {
            return Err(GeomError::ReachExceeded {
                name: base.name.clone(),
                eps,
                bound,
            });
        }
        Ok(TubeConfig { base, eps })
    }
}

/// Parametrization data of one sheet of ∂N.
#[derive(Clone, Debug)]
pub(crate) struct TubeShape {
    base: Immersion,
    eps: f64,
    /// ±1 for hypersurface bases; unused otherwise.
    sheet: f64,
}

/// Point of S^{n−1} from chart coordinates: n = 1 uses the sheet sign, n = 2
/// one angle, n = 3 polar angle and azimuth.
fn sphere_chart<T: Real>(n: usize, angles: &[T], sheet: f64) -> Vec<T> {
    match n {
        1 => vec![T::cst(sheet)],
        2 => vec![angles[0].cos(), angles[0].sin()],
        _ => {
            let s = angles[0].sin();
            vec![s * angles[1].cos(), s * angles[1].sin(), angles[0].cos()]
        }
    }
}

/// Inverse of [`sphere_chart`] for a unit vector.
fn chart_angles(c: &[f64]) -> Vec<f64> {
    match c.len() {
        1 => vec![],
        2 => vec![c[1].atan2(c[0]).rem_euclid(2.0 * std::f64::consts::PI)],
        _ => vec![
            c[2].clamp(-1.0, 1.0).acos(),
            c[1].atan2(c[0]).rem_euclid(2.0 * std::f64::consts::PI),
        ],
    }
}

/// Jacobian factor of the chart: sin ψ for n = 3, else 1.
fn chart_density(n: usize, angles: &[f64]) -> f64 {
    if n == 3 {
        angles[0].sin()
    } else {
        1.0
    }
}

impl TubeShape {
    pub(crate) fn eval<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        let base = &self.base;
        let (m, k) = (base.m, base.k);
        let n = k - m;
        // Pivots come from the same data the base FrameData uses, so the tube
        // chart and the base normal frame agree.
        let xv: Vec<f64> = p[..m].iter().map(|t| t.value()).collect();
        let jet = base.evaluate_jet2(&xv)?;
        let tangents_f: Vec<Vec<f64>> = (0..m)
            .map(|i| jet.d1.column(i).iter().copied().collect())
            .collect();
        let ortho_f = orthonormal_tangents(&tangents_f)?;
        let pivots = select_pivots(&ortho_f, k)?;

        let x: Vec<Tangent<T>> = (0..m).map(|i| Tangent::variable(m, i, p[i])).collect();
        let xb = base.eval_base_generic(&x)?;
        let tangents: Vec<Vec<T>> = (0..m)
            .map(|i| xb.iter().map(|c| c.d[i]).collect())
            .collect();
        let ortho = orthonormal_tangents(&tangents)?;
        let mut frame = normal_frame_with_pivots(&ortho, k, &pivots);
        if n == 1 {
            let nv: Vec<f64> = frame[0].iter().map(|t| t.value()).collect();
            let sign = orientation_sign(&tangents_f, &nv);
            frame[0] = frame[0].iter().map(|t| *t * sign).collect();
        }
        let y = sphere_chart(n, &p[m..], self.sheet);
        Ok((0..k)
            .map(|a| {
                let mut acc = xb[a].v;
                for (ys, nu) in y.iter().zip(&frame) {
                    acc = acc + *ys * nu[a] * self.eps;
                }
                acc
            })
            .collect())
    }
}

/// Random base parameter point and uniformly distributed unit normal.
pub fn sample_tube_point<R: Rng + ?Sized>(
    base: &Immersion,
    rng: &mut R,
) -> Result<(Vec<f64>, NormalDirection)> {
    let u = base.sample_point(rng);
    loop {
        let c: Vec<f64> = (0..base.n()).map(|_| rng.sample(StandardNormal)).collect();
        if c.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            return Ok((u, NormalDirection::normalized(c)?));
        }
    }
}

/// The sheets of ∂N: two for hypersurface bases (`+` along the oriented
/// normal, `−` opposite), one otherwise.
#[derive(Clone, Debug)]
pub struct TubeBoundary {
    pub config: TubeConfig,
    pub sheets: Vec<(String, Immersion)>,
}

impl TubeBoundary {
    /// Sheet containing base-normal direction `nu`.
    fn sheet_for(&self, nu: &NormalDirection) -> &Immersion {
        if self.sheets.len() == 2 && nu.coeffs()[0] < 0.0 {
            &self.sheets[1].1
        } else {
            &self.sheets[0].1
        }
    }
}

/// Builds ∂N as a (k−1)-dimensional immersion in ℝ^k with parameters
/// (base parameters, normal-sphere chart).
pub fn tube_boundary_immersion(cfg: &TubeConfig) -> Result<TubeBoundary> {
    let base = &cfg.base;
    let n = base.n();
    let mut domain = base.domain.clone();
    match n {
        1 => {}
        2 => domain.push(Axis::angle()),
        _ => {
            domain.push(Axis::polar());
            domain.push(Axis::angle());
        }
    }
    let signs: &[(f64, &str)] = if n == 1 {
        &[(1.0, "+"), (-1.0, "-")]
    } else {
        &[(1.0, "")]
    };
    let sheets = signs
        .iter()
        .map(|&(sheet, label)| {
            let name = format!("tube({}, eps={}){}", base.name, cfg.eps, label);
            let shape = Shape::Tube(Box::new(TubeShape {
                base: base.clone(),
                eps: cfg.eps,
                sheet,
            }));
            let imm = Immersion::new(
                name,
                base.k,
                domain.clone(),
                None,
                vec![("eps".into(), cfg.eps)],
                shape,
            );
            (label.to_string(), imm)
        })
        .collect();
    Ok(TubeBoundary {
        config: cfg.clone(),
        sheets,
    })
}

/// A point p + εν of ∂N with its curvature data.
#[derive(Clone, Debug)]
pub struct TubePoint {
    pub u: Vec<f64>,
    pub nu_hat: NormalDirection,
    /// Parameters of the point in the tube immersion.
    pub tube_params: Vec<f64>,
    pub point: DVector<f64>,
    pub base_point: DVector<f64>,
    /// Outward unit normal g = ν of ∂N.
    pub gauss_normal: DVector<f64>,
    /// K^g of ∂N, from the tube immersion's own jets.
    pub classical_k: f64,
    pub normal_jacobian: f64,
    pub(crate) tube_frame: FrameData,
}

/// det(Π^g)/det(I) of a tube immersion at a point, with g the outward normal.
pub fn classical_curvature(tube_frame: &FrameData, gauss_normal: &DVector<f64>) -> Result<f64> {
    let c: Vec<f64> = (tube_frame.normal_frame.transpose() * gauss_normal)
        .iter()
        .copied()
        .collect();
    Ok(directional_curvature(
        tube_frame,
        &NormalDirection::normalized(c)?,
    ))
}

/// Evaluates ∂N above base parameter `u` in base-normal direction `nu_hat`.
pub fn tube_point(tube: &TubeBoundary, u: &[f64], nu_hat: &NormalDirection) -> Result<TubePoint> {
    let cfg = &tube.config;
    let base = &cfg.base;
    let u = base.wrap(u)?;
    if nu_hat.coeffs().len() != base.n() {
        return Err(GeomError::PointArity {
            expected: base.n(),
            got: nu_hat.coeffs().len(),
        });
    }
    let base_fd = base.frame(&u)?;
    let gauss_normal = base_fd.ambient_normal(nu_hat.coeffs());
    let mut params = u.clone();
    params.extend(chart_angles(nu_hat.coeffs()));
    let sheet = tube.sheet_for(nu_hat);
    let jet = sheet.evaluate_jet2(&params)?;
    let tube_frame = fundamental_forms(&jet)?;
    let classical_k = classical_curvature(&tube_frame, &gauss_normal)?;
    Ok(TubePoint {
        base_point: base.evaluate_point(&u)?,
        normal_jacobian: normal_jacobian_from(&base_fd, cfg.eps, nu_hat)?,
        u,
        nu_hat: nu_hat.clone(),
        tube_params: params,
        point: jet.point,
        gauss_normal,
        classical_k,
        tube_frame,
    })
}

fn normal_jacobian_from(fd: &FrameData, eps: f64, nu: &NormalDirection) -> Result<f64> {
    let (_, forms) = fd.orthonormal_second_form()?;
    let m = fd.m();
    let mut pi = DMatrix::zeros(m, m);
    for (c, f) in nu.coeffs().iter().zip(&forms) {
        pi += f * *c;
    }
    let det = (DMatrix::identity(m, m) - pi * eps).determinant();
    if !(det > 1e-12) {
        return Err(GeomError::FocalPoint);
    }
    Ok(1.0 / det)
}

/// NJ(π) = 1/det(I − εΠ^ν) with Π^ν in an orthonormal basis of the base.
pub fn normal_jacobian(cfg: &TubeConfig, u: &[f64], nu_hat: &NormalDirection) -> Result<f64> {
    normal_jacobian_from(&cfg.base.frame(u)?, cfg.eps, nu_hat)
}

/// Both sides of K^g/NJ = (−1)^{n−1} ε^{−(n−1)} K^ν.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// residual / max(1, |lhs|, |rhs|).
    pub relative: f64,
}

pub fn tube_identity_check(
    tube: &TubeBoundary,
    u: &[f64],
    nu_hat: &NormalDirection,
) -> Result<TubeIdentity> {
    let tp = tube_point(tube, u, nu_hat)?;
    let base = &tube.config.base;
    let eps = tube.config.eps;
    let n = base.n() as i32;
    let k_nu = directional_curvature(&base.frame(&tp.u)?, nu_hat);
    let lhs = tp.classical_k / tp.normal_jacobian;
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign * k_nu / eps.powi(n - 1);
    let residual = (lhs - rhs).abs();
    Ok(TubeIdentity {
        lhs,
        rhs,
        residual,
        relative: residual / 1f64.max(lhs.abs()).max(rhs.abs()),
    })
}

/// Shape-operator spectrum of ∂N against {λ_i/(1 − ελ_i)} ∪ {−1/ε}^{n−1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    pub observed: Vec<f64>,
    pub predicted: Vec<f64>,
    /// Largest gap after sorting both lists; bounds the Hausdorff distance
    /// and also sees multiplicities.
    pub distance: f64,
}

pub fn tube_spectrum_check(
    tube: &TubeBoundary,
    u: &[f64],
    nu_hat: &NormalDirection,
) -> Result<SpectrumCheck> {
    let tp = tube_point(tube, u, nu_hat)?;
    let eps = tube.config.eps;
    let base = &tube.config.base;

    let tf = &tp.tube_frame;
    let g_coeff = (tf.normal_frame.transpose() * &tp.gauss_normal)[0].signum();
    let w = linalg::whitening(&tf.metric)?;
    let shape = linalg::congruence(&w, &(&tf.second_form[0] * g_coeff));
    let observed = linalg::sorted_symmetric_eigenvalues(&shape);

    let (_, forms) = base.frame(&tp.u)?.orthonormal_second_form()?;
    let m = base.m;
    let mut pi = DMatrix::zeros(m, m);
    for (c, f) in nu_hat.coeffs().iter().zip(&forms) {
        pi += f * *c;
    }
    let mut predicted: Vec<f64> = linalg::sorted_symmetric_eigenvalues(&pi)
        .into_iter()
        .map(|l| l / (1.0 - eps * l))
        .collect();
    predicted.extend(std::iter::repeat_n(-1.0 / eps, base.n() - 1));
    predicted.sort_by(|a, b| a.total_cmp(b));

    let distance = observed
        .iter()
        .zip(&predicted)
        .fold(0.0, |d, (a, b)| f64::max(d, (a - b).abs()));
    Ok(SpectrumCheck {
        observed,
        predicted,
        distance,
    })
}

/// det I_∂N in (x, θ) coordinates against
/// ε^{2(n−1)} det(1 − εΠ^ν)² det(I_base) J_chart².
pub fn metric_determinant_check(
    tube: &TubeBoundary,
    u: &[f64],
    nu_hat: &NormalDirection,
) -> Result<(f64, f64)> {
    let tp = tube_point(tube, u, nu_hat)?;
    let base = &tube.config.base;
    let n = base.n();
    let eps = tube.config.eps;
    let lhs = tp.tube_frame.metric.determinant();
    let det_base = base.metric(&tp.u)?.determinant();
    let factor = 1.0 / tp.normal_jacobian;
    let j = chart_density(n, &tp.tube_params[base.m..]);
    let rhs = eps.powi(2 * (n as i32 - 1)) * factor * factor * det_base * j * j;
    Ok((lhs, rhs))
}

/// ∫_∂N K^g dV per sheet and in total, against (−1)^{k−1} ω_{k−1} χ(M).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeTotal {
    pub sheets: Vec<(String, f64)>,
    pub integral: f64,
    pub expected: f64,
    pub residual: f64,
    /// residual / max(1, |expected|).
    pub relative: f64,
}

pub fn tube_total_curvature(tube: &TubeBoundary, res: Option<Resolution>) -> Result<TubeTotal> {
    let base = &tube.config.base;
    let chi = base
        .euler_char
        .ok_or_else(|| GeomError::UnknownEuler(base.name.clone()))?;
    let eps = tube.config.eps;
    let m = base.m;
    let mut sheets = Vec::with_capacity(tube.sheets.len());
    for (label, imm) in &tube.sheets {
        let res = res.unwrap_or_else(|| Resolution::default_for(imm.m));
        let grid = QuadratureGrid::new(&imm.domain, res);
        let integral = integrate_with_jet(imm, &grid, |params, jet| {
            let fd = fundamental_forms(jet)?;
            let x = base.evaluate_point(&params[..m])?;
            let g = (&jet.point - x) / eps;
            classical_curvature(&fd, &g)
        })?;
        sheets.push((label.clone(), integral));
    }
    let integral: f64 = sheets.iter().map(|s| s.1).sum();
    let k = base.k;
    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let expected = sign * sphere_volume(k - 1) * chi as f64;
    let residual = (integral - expected).abs();
    Ok(TubeTotal {
        sheets,
        integral,
        expected,
        residual,
        relative: residual / expected.abs().max(1.0),
    })
}
