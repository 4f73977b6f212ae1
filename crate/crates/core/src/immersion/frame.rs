use nalgebra::DMatrix;

use super::Jet2;
use crate::autodiff::Real;
use crate::error::{GeomError, Result};
use crate::linalg;

/// Relative size below which a Gram-Schmidt residual counts as zero.
const RANK_TOL: f64 = 1e-10;

/// Metric, vector-valued second fundamental form and normal frame at a point.
#[derive(Clone, Debug)]
pub struct FrameData {
    /// First fundamental form, m×m.
    pub metric: DMatrix<f64>,
    /// `second_form[s][(i, j)] = ⟨Π(∂_i, ∂_j), ν_s⟩`, one m×m matrix per normal.
    pub second_form: Vec<DMatrix<f64>>,
    /// k×n, orthonormal columns spanning the normal space.
    pub normal_frame: DMatrix<f64>,
}

impl FrameData {
    pub fn m(&self) -> usize {
        self.metric.nrows()
    }

    pub fn n(&self) -> usize {
        self.second_form.len()
    }

    /// Π^ν = Σ_s c_s Π_s in coordinate basis.
    pub fn second_form_along(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (c, s) in coeffs.iter().zip(&self.second_form) {
            out += s * *c;
        }
        out
    }

    /// Second fundamental form components in the Cholesky-whitened orthonormal
    /// tangent basis, together with the whitening matrix.
    pub fn orthonormal_second_form(&self) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
        let w = linalg::whitening(&self.metric)?;
        let forms = self
            .second_form
            .iter()
            .map(|s| linalg::congruence(&w, s))
            .collect();
        Ok((w, forms))
    }

    /// Ambient normal vector with frame coordinates `coeffs`.
    pub fn ambient_normal(&self, coeffs: &[f64]) -> nalgebra::DVector<f64> {
        &self.normal_frame * nalgebra::DVector::from_column_slice(coeffs)
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::cst(0.0);
    for (x, y) in a.iter().zip(b) {
        acc = acc + *x * *y;
    }
    acc
}

/// Modified Gram-Schmidt on the tangent vectors, in order.
pub(crate) fn orthonormal_tangents<T: Real>(tangents: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let scale = tangents
        .iter()
        .map(|t| dot(t, t).value().sqrt())
        .fold(0.0, f64::max);
    let mut out: Vec<Vec<T>> = Vec::with_capacity(tangents.len());
    for (i, t) in tangents.iter().enumerate() {
        let mut r = t.clone();
        for q in &out {
            let c = dot(&r, q);
            for (ra, qa) in r.iter_mut().zip(q) {
                *ra = *ra - c * *qa;
            }
        }
        let norm = dot(&r, &r).sqrt();
        if !(norm.value() > RANK_TOL * scale) {
            return Err(GeomError::Degenerate(format!(
                "first-derivative matrix loses rank at tangent {i}"
            )));
        }
        let inv = norm.recip();
        out.push(r.into_iter().map(|x| x * inv).collect());
    }
    Ok(out)
}

/// Projects `e_p` off the tangent space and off the normals already built,
/// returning the unnormalized residual.
fn residual<T: Real>(p: usize, k: usize, tangents: &[Vec<T>], normals: &[Vec<T>]) -> Vec<T> {
    let mut r: Vec<T> = (0..k)
        .map(|a| T::cst(if a == p { 1.0 } else { 0.0 }))
        .collect();
    for q in tangents.iter().chain(normals) {
        let c = q[p];
        for (ra, qa) in r.iter_mut().zip(q) {
            *ra = *ra - c * *qa;
        }
    }
    // Second pass guards against loss of orthogonality.
    for q in tangents.iter().chain(normals) {
        let c = dot(&r, q);
        for (ra, qa) in r.iter_mut().zip(q) {
            *ra = *ra - c * *qa;
        }
    }
    r
}

/// Chooses which ambient basis vectors seed the normal frame: the ones whose
/// projection onto the normal space is largest (ties by lowest index), in
/// decreasing order of that norm. A candidate whose residual vanishes after
/// removing the earlier picks is skipped.
pub(crate) fn select_pivots(ortho_tangents: &[Vec<f64>], k: usize) -> Result<Vec<usize>> {
    let n = k - ortho_tangents.len();
    let mut order: Vec<(usize, f64)> = (0..k)
        .map(|p| {
            let proj: f64 = ortho_tangents.iter().map(|t| t[p] * t[p]).sum();
            (p, (1.0 - proj).max(0.0))
        })
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut pivots = Vec::with_capacity(n);
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (p, _) in order {
        if pivots.len() == n {
            break;
        }
        let r = residual(p, k, ortho_tangents, &normals);
        let norm = dot(&r, &r).sqrt();
        if norm > 1e-6 {
            normals.push(r.into_iter().map(|x| x / norm).collect());
            pivots.push(p);
        }
    }
    if pivots.len() < n {
        return Err(GeomError::Degenerate(
            "could not complete a normal frame".into(),
        ));
    }
    Ok(pivots)
}

/// Gram-Schmidt normal frame seeded by the given ambient basis vectors.
/// Smooth in the parametrization wherever the pivots stay fixed.
pub(crate) fn normal_frame_with_pivots<T: Real>(
    ortho_tangents: &[Vec<T>],
    k: usize,
    pivots: &[usize],
) -> Vec<Vec<T>> {
    let mut normals: Vec<Vec<T>> = Vec::with_capacity(pivots.len());
    for &p in pivots {
        let r = residual(p, k, ortho_tangents, &normals);
        let inv = dot(&r, &r).sqrt().recip();
        normals.push(r.into_iter().map(|x| x * inv).collect());
    }
    normals
}

/// +1 if (t_1, …, t_m, ν) is positively oriented in ℝ^k, −1 otherwise.
/// Fixes the sign of a hypersurface normal consistently across a chart.
pub(crate) fn orientation_sign(tangents: &[Vec<f64>], normal: &[f64]) -> f64 {
    let k = normal.len();
    let mat = DMatrix::from_fn(k, k, |a, j| {
        if j < tangents.len() {
            tangents[j][a]
        } else {
            normal[a]
        }
    });
    if mat.determinant() < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Metric `d1ᵀd1`, a normal frame (oriented for hypersurfaces), and the second fundamental form
/// `⟨∂_i∂_j X, ν_s⟩` (the normal part of the ambient derivative).
pub fn fundamental_forms(jet: &Jet2) -> Result<FrameData> {
    let (k, m) = (jet.k(), jet.m());
    let tangents: Vec<Vec<f64>> = (0..m)
        .map(|i| jet.d1.column(i).iter().copied().collect())
        .collect();
    let ortho = orthonormal_tangents(&tangents)?;
    let pivots = select_pivots(&ortho, k)?;
    let mut normals = normal_frame_with_pivots(&ortho, k, &pivots);
    if normals.len() == 1 {
        let sign = orientation_sign(&tangents, &normals[0]);
        normals[0].iter_mut().for_each(|x| *x *= sign);
    }
    let n = normals.len();
    let normal_frame = DMatrix::from_fn(k, n, |a, s| normals[s][a]);
    let metric = jet.d1.transpose() * &jet.d1;
    let second_form = normals
        .iter()
        .map(|nu| {
            DMatrix::from_fn(m, m, |i, j| {
                (0..k).map(|a| jet.d2[a][(i, j)] * nu[a]).sum::<f64>()
            })
        })
        .collect();
    Ok(FrameData {
        metric,
        second_form,
        normal_frame,
    })
}
