//! Small dense helpers shared by the curvature and tube code.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};

/// Returns `W` with `Wᵀ G W = I`, built from the Cholesky factor `G = L Lᵀ`
/// as `W = L⁻ᵀ`. Column `a` of `W` holds the coordinates of the `a`-th
/// orthonormal tangent vector.
pub fn whitening(metric: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = metric
        .clone()
        .cholesky()
        .ok_or_else(|| GeomError::Degenerate("metric is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| GeomError::Degenerate("singular Cholesky factor".into()))?;
    Ok(linv.transpose())
}

/// `Wᵀ A W`: a bilinear form expressed in the basis given by the columns of `W`.
pub fn congruence(w: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    w.transpose() * a * w
}

/// Every permutation of `0..m` together with its sign, in lexicographic order.
pub fn signed_permutations(m: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
        let m = used.len();
        if prefix.len() == m {
            let mut inversions = 0;
            for i in 0..m {
                for j in i + 1..m {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            out.push((prefix.clone(), sign));
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let sym = (a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitening_orthonormalizes() {
        let g = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let w = whitening(&g).unwrap();
        let id = congruence(&w, &g);
        assert!((id - DMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn whitening_rejects_indefinite_metric() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(whitening(&g), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn permutation_signs() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().map(|p| p.1).sum::<f64>(), 0.0);
        let swap = perms.iter().find(|p| p.0 == vec![1, 0, 2, 3]).unwrap();
        assert_eq!(swap.1, -1.0);
        let cycle = perms.iter().find(|p| p.0 == vec![1, 2, 0, 3]).unwrap();
        assert_eq!(cycle.1, 1.0);
    }
}
