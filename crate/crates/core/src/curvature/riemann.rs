use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::immersion::{FrameData, Immersion};
use crate::linalg;

/// Riemann coefficients R_{ijkl} = ⟨R(e_i, e_j)e_k, e_l⟩ with
/// R(X,Y) = [∇_X, ∇_Y] − ∇_{[X,Y]}, in an orthonormal tangent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    m: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(m: usize) -> Self {
        CurvatureTensor {
            m,
            data: vec![0.0; m.pow(4)],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let p = self.idx(i, j, k, l);
        self.data[p] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        assert_eq!(self.m, other.m);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Largest violation of antisymmetry, pair symmetry and first Bianchi.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Components in the basis whose vectors are the columns of `w`:
    /// R'_{abcd} = Σ W_ia W_jb W_kc W_ld R_{ijkl}.
    fn change_basis(&self, w: &DMatrix<f64>) -> CurvatureTensor {
        let m = self.m;
        let mut cur = self.data.clone();
        // Contract one index at a time.
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = m.pow(3 - slot as u32);
            for (p, out) in next.iter_mut().enumerate() {
                let a = (p / stride) % m;
                let base = p - a * stride;
                let mut acc = 0.0;
                for i in 0..m {
                    acc += w[(i, a)] * cur[base + i * stride];
                }
                *out = acc;
            }
            cur = next;
        }
        CurvatureTensor { m, data: cur }
    }
}

/// R_{ijkl} = Σ_s Π^s_{il}Π^s_{jk} − Π^s_{ik}Π^s_{jl}, with Π in the
/// Cholesky-whitened orthonormal tangent basis.
pub fn gauss_equation_tensor(fd: &FrameData) -> Result<CurvatureTensor> {
    let (_, forms) = fd.orthonormal_second_form()?;
    let m = fd.m();
    let mut r = CurvatureTensor::zeros(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v: f64 = forms
                        .iter()
                        .map(|p| p[(i, l)] * p[(j, k)] - p[(i, k)] * p[(j, l)])
                        .sum();
                    r.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(r)
}

/// Fourth-order central difference weights at offsets −2, −1, 1, 2.
const STENCIL: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

fn shifted(u: &[f64], axis: usize, by: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[axis] += by;
    v
}

/// Γ^a_{bc} at `u`, stored as `gamma[a][b][c]`, from central differences of
/// the metric.
fn christoffel(imm: &Immersion, u: &[f64], steps: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = imm.m;
    let g = imm.metric(u)?;
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::Degenerate("singular metric".into()))?;
    // dg[c] = ∂_c g
    let mut dg = Vec::with_capacity(m);
    for (c, &h) in steps.iter().enumerate() {
        let mut acc = DMatrix::zeros(m, m);
        for (off, w) in STENCIL {
            acc += imm.metric(&shifted(u, c, off * h))? * w;
        }
        dg.push(acc / (12.0 * h));
    }
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let mut acc = 0.0;
                for d in 0..m {
                    acc += ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                }
                gamma[a][b][c] = 0.5 * acc;
            }
        }
    }
    Ok(gamma)
}

/// Riemann tensor from the metric alone: the metric comes from 1-jets on a
/// stencil, Christoffel symbols and their derivatives from fourth-order
/// central differences with h = 1e−4 × axis length. Returned in the same
/// orthonormal basis as [`gauss_equation_tensor`].
pub fn intrinsic_curvature_fd(imm: &Immersion, u: &[f64]) -> Result<CurvatureTensor> {
    let u = imm.wrap(u)?;
    let m = imm.m;
    let steps: Vec<f64> = imm.domain.iter().map(|ax| 1e-4 * ax.len()).collect();
    let gamma = christoffel(imm, &u, &steps)?;
    // dgamma[e][a][b][c] = ∂_e Γ^a_{bc}
    let mut dgamma = Vec::with_capacity(m);
    for (e, &h) in steps.iter().enumerate() {
        let mut acc = vec![vec![vec![0.0; m]; m]; m];
        for (off, w) in STENCIL {
            let ge = christoffel(imm, &shifted(&u, e, off * h), &steps)?;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        acc[a][b][c] += w * ge[a][b][c] / (12.0 * h);
                    }
                }
            }
        }
        dgamma.push(acc);
    }
    let g = imm.metric(&u)?;
    // R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} − ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ}
    let up = |rho: usize, sigma: usize, mu: usize, nu: usize| -> f64 {
        let mut v = dgamma[mu][rho][nu][sigma] - dgamma[nu][rho][mu][sigma];
        for lam in 0..m {
            v += gamma[rho][mu][lam] * gamma[lam][nu][sigma]
                - gamma[rho][nu][lam] * gamma[lam][mu][sigma];
        }
        v
    };
    let mut coord = CurvatureTensor::zeros(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    // ⟨R(∂_i, ∂_j)∂_k, ∂_l⟩ = g_{lρ} R^ρ_{kij}
                    let v: f64 = (0..m).map(|rho| g[(l, rho)] * up(rho, k, i, j)).sum();
                    coord.set(i, j, k, l, v);
                }
            }
        }
    }
    let w = linalg::whitening(&g)?;
    Ok(coord.change_basis(&w))
}

/// Coefficient of dV in Pff(−Ω/2π) for m = 2r:
/// (−1)^r Σ_{τ,η ∈ S_m} (−1)^{η}(−1)^{τ} / (2^{m+r} π^r r!) ∏_t R_{η(2t−1)η(2t)τ(2t−1)τ(2t)}.
pub fn pfaffian_density(r: &CurvatureTensor) -> Result<f64> {
    let m = r.m();
    if m % 2 == 1 {
        return Err(GeomError::UnsupportedDimension(
            "Pfaffian undefined for odd dimension".into(),
        ));
    }
    if m != 2 && m != 4 {
        return Err(GeomError::UnsupportedDimension(format!(
            "Pfaffian density implemented for m = 2 and m = 4, got m = {m}"
        )));
    }
    let half = m / 2;
    let perms = linalg::signed_permutations(m);
    let mut total = 0.0;
    for (tau, st) in &perms {
        for (eta, se) in &perms {
            let mut prod = st * se;
            for t in 0..half {
                prod *= r.get(eta[2 * t], eta[2 * t + 1], tau[2 * t], tau[2 * t + 1]);
            }
            total += prod;
        }
    }
    let r_fact: f64 = (1..=half).map(|x| x as f64).product();
    let sign = if half % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * total / (2f64.powi((m + half) as i32) * PI.powi(half as i32) * r_fact))
}
