//! Axis rules, tensor-product grids over chart domains, and quadrature on
//! the unit normal sphere S^{n−1}.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curvature::sphere_volume;
use crate::immersion::Axis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Trapezoid,
    GaussLegendre,
}

/// Nodes and weights along one axis.
#[derive(Clone, Debug)]
pub struct AxisRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// Equispaced rule for a periodic interval; weights sum to the period.
    pub fn trapezoid(min: f64, max: f64, count: usize) -> AxisRule {
        assert!(count >= 1);
        let h = (max - min) / count as f64;
        AxisRule {
            kind: RuleKind::Trapezoid,
            nodes: (0..count).map(|j| min + h * j as f64).collect(),
            weights: vec![h; count],
        }
    }

    /// Gauss-Legendre rule mapped to [min, max]; interior nodes only.
    pub fn gauss_legendre(min: f64, max: f64, count: usize) -> AxisRule {
        let (x, w) = gauss_legendre_unit(count);
        let half = 0.5 * (max - min);
        let mid = 0.5 * (max + min);
        AxisRule {
            kind: RuleKind::GaussLegendre,
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|w| half * w).collect(),
        }
    }

    pub fn for_axis(axis: &Axis, count: usize) -> AxisRule {
        if axis.periodic {
            AxisRule::trapezoid(axis.min, axis.max, count)
        } else {
            AxisRule::gauss_legendre(axis.min, axis.max, count)
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre P_n and P_n' at x by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes (ascending) and weights of the n-point Gauss-Legendre rule on [−1, 1].
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Tensor-product grid: one rule per chart axis.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub axes: Vec<AxisRule>,
}

/// Nodes per axis, split by axis kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub interval: usize,
    pub periodic: usize,
}

impl Resolution {
    pub fn new(interval: usize, periodic: usize) -> Self {
        Resolution { interval, periodic }
    }

    /// 96/128 for m ≤ 2, 64/96 for m = 3, 32/48 beyond.
    pub fn default_for(m: usize) -> Self {
        match m {
            0..=2 => Resolution::new(96, 128),
            3 => Resolution::new(64, 96),
            _ => Resolution::new(32, 48),
        }
    }

    pub fn doubled(self) -> Self {
        Resolution::new(2 * self.interval, 2 * self.periodic)
    }
}

impl QuadratureGrid {
    pub fn new(domain: &[Axis], res: Resolution) -> QuadratureGrid {
        QuadratureGrid {
            axes: domain
                .iter()
                .map(|ax| {
                    AxisRule::for_axis(
                        ax,
                        if ax.periodic {
                            res.periodic
                        } else {
                            res.interval
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(AxisRule::len).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(AxisRule::len).collect()
    }
}

/// Quadrature rule on the unit sphere S^{n−1} ⊂ ℝ^n.
#[derive(Clone, Debug)]
pub struct NormalSphereRule {
    pub dim: usize,
    /// Unit vectors in ℝ^dim.
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl NormalSphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

pub const MONTE_CARLO_SEED: u64 = 0x6a75_7373;

/// Default order: n = 2 → 64 nodes, n = 3 → 32 × 64, n > 3 → 20000 samples.
pub fn default_sphere_order(n: usize) -> usize {
    match n {
        0 | 1 => 1,
        2 => 64,
        3 => 32,
        _ => 20_000,
    }
}

/// Rule on S^{n−1} whose weights sum to ω_{n−1}.
///
/// * n = 1: the two points ±1 with unit weights.
/// * n = 2: `order` equispaced angles.
/// * n = 3: `order`-point Gauss-Legendre in the polar cosine times a
///   `2·order`-point trapezoid in the azimuth.
/// * n > 3: `order` Monte Carlo samples with a fixed seed.
pub fn normal_sphere_rule(n: usize, order: usize) -> NormalSphereRule {
    assert!(n >= 1, "normal sphere needs codimension ≥ 1");
    match n {
        1 => NormalSphereRule {
            dim: 1,
            nodes: vec![vec![1.0], vec![-1.0]],
            weights: vec![1.0, 1.0],
        },
        2 => {
            let ang = AxisRule::trapezoid(0.0, 2.0 * PI, order);
            NormalSphereRule {
                dim: 2,
                nodes: ang.nodes.iter().map(|t| vec![t.cos(), t.sin()]).collect(),
                weights: ang.weights,
            }
        }
        3 => {
            let (z, wz) = gauss_legendre_unit(order);
            let phi = AxisRule::trapezoid(0.0, 2.0 * PI, 2 * order);
            let mut nodes = Vec::with_capacity(z.len() * phi.len());
            let mut weights = Vec::with_capacity(nodes.capacity());
            for (zi, wi) in z.iter().zip(&wz) {
                let rho = (1.0 - zi * zi).sqrt();
                for (p, wp) in phi.nodes.iter().zip(&phi.weights) {
                    nodes.push(vec![rho * p.cos(), rho * p.sin(), *zi]);
                    weights.push(wi * wp);
                }
            }
            NormalSphereRule {
                dim: 3,
                nodes,
                weights,
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(MONTE_CARLO_SEED);
            let w = sphere_volume(n - 1) / order as f64;
            let nodes = (0..order)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect();
            NormalSphereRule {
                dim: n,
                nodes,
                weights: vec![w; order],
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_small_rules_match_tables() {
        let (x, w) = gauss_legendre_unit(3);
        let r = (0.6f64).sqrt();
        assert!((x[0] + r).abs() < 1e-15 && x[1] == 0.0 && (x[2] - r).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 12, 32, 96] {
            let rule = AxisRule::gauss_legendre(-0.5, 2.0, n);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.5).abs() < 1e-13, "n={n}");
            let deg = (2 * n - 1).min(40) as i32;
            let approx: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(deg))
                .sum();
            let exact = (2f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!(
                (approx - exact).abs() < 1e-13 * exact.abs().max(1.0),
                "n={n}"
            );
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.nodes.iter().all(|&x| x > -0.5 && x < 2.0));
        }
    }

    #[test]
    fn trapezoid_is_exact_below_nyquist() {
        let rule = AxisRule::trapezoid(0.0, 2.0 * PI, 16);
        assert!((rule.weights.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-14);
        for f in 1..8 {
            let c: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * (f as f64 * x).cos().powi(2))
                .sum();
            assert!((c - PI).abs() < 1e-13, "freq {f}");
        }
    }

    #[test]
    fn sphere_rules() {
        let r1 = normal_sphere_rule(1, 1);
        assert_eq!(r1.nodes, vec![vec![1.0], vec![-1.0]]);
        assert_eq!(r1.weights, vec![1.0, 1.0]);

        let r2 = normal_sphere_rule(2, 64);
        assert!((r2.weights.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-13);

        let r3 = normal_sphere_rule(3, 32);
        assert!((r3.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-13);
        let second = r3.integrate(|v| v[0] * v[0]);
        assert!((second - 4.0 * PI / 3.0).abs() < 1e-13);

        let r5 = normal_sphere_rule(5, 1000);
        assert!((r5.weights.iter().sum::<f64>() - sphere_volume(4)).abs() < 1e-12);
        assert!(r5
            .nodes
            .iter()
            .all(|v| (v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14));
    }
}
