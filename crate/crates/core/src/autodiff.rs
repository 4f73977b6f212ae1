//! Truncated Taylor arithmetic.
//!
//! Parametrizations are written once, generically over [`Real`], and evaluated
//! with [`Taylor2`] to obtain exact first and second partial derivatives. The
//! first-order [`Tangent`] wrapper layered on top of another `Real` gives one
//! more derivative order; the tube construction uses `Tangent<Taylor2>` to get
//! second-order jets of the base normal frame.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Largest number of independent variables a jet can carry.
pub const MAX_VARS: usize = 6;
const PACKED: usize = MAX_VARS * (MAX_VARS + 1) / 2;

/// Scalar ring with the elementary functions needed by the catalog.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(c: f64) -> Self;
    /// Zeroth-order coefficient.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Real for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Second-order multivariate Taylor number: value, gradient and symmetric
/// Hessian with respect to up to [`MAX_VARS`] variables.
///
/// The Hessian is stored packed, so symmetry holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor2 {
    nvars: usize,
    v: f64,
    g: [f64; MAX_VARS],
    h: [f64; PACKED],
}

impl Taylor2 {
    pub fn constant(c: f64) -> Self {
        Taylor2 {
            nvars: 0,
            v: c,
            g: [0.0; MAX_VARS],
            h: [0.0; PACKED],
        }
    }

    /// The `i`-th of `nvars` independent variables, expanded at `value`.
    pub fn variable(nvars: usize, i: usize, value: f64) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} jet variables");
        assert!(i < nvars);
        let mut t = Taylor2::constant(value);
        t.nvars = nvars;
        t.g[i] = 1.0;
        t
    }

    /// Seeds a full set of variables at the point `u`.
    pub fn variables(u: &[f64]) -> Vec<Taylor2> {
        u.iter()
            .enumerate()
            .map(|(i, &x)| Taylor2::variable(u.len(), i, x))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.g[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[packed(i, j)]
    }

    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.nvars;
        let mut out = Taylor2::constant(f0);
        out.nvars = n;
        for b in 0..n {
            out.g[b] = f1 * self.g[b];
            for a in 0..=b {
                let p = packed(a, b);
                out.h[p] = f1 * self.h[p] + f2 * self.g[a] * self.g[b];
            }
        }
        out
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    fn add(mut self, rhs: Taylor2) -> Taylor2 {
        let n = self.nvars.max(rhs.nvars);
        self.nvars = n;
        self.v += rhs.v;
        for i in 0..n {
            self.g[i] += rhs.g[i];
        }
        for p in 0..n * (n + 1) / 2 {
            self.h[p] += rhs.h[p];
        }
        self
    }
}

impl Sub for Taylor2 {
    type Output = Taylor2;
    fn sub(self, rhs: Taylor2) -> Taylor2 {
        self + (-rhs)
    }
}

impl Neg for Taylor2 {
    type Output = Taylor2;
    fn neg(mut self) -> Taylor2 {
        let n = self.nvars;
        self.v = -self.v;
        for i in 0..n {
            self.g[i] = -self.g[i];
        }
        for p in 0..n * (n + 1) / 2 {
            self.h[p] = -self.h[p];
        }
        self
    }
}

impl Mul for Taylor2 {
    type Output = Taylor2;
    fn mul(self, rhs: Taylor2) -> Taylor2 {
        let n = self.nvars.max(rhs.nvars);
        let mut out = Taylor2::constant(self.v * rhs.v);
        out.nvars = n;
        for b in 0..n {
            out.g[b] = self.v * rhs.g[b] + rhs.v * self.g[b];
            for a in 0..=b {
                let p = packed(a, b);
                out.h[p] = self.v * rhs.h[p]
                    + rhs.v * self.h[p]
                    + self.g[a] * rhs.g[b]
                    + self.g[b] * rhs.g[a];
            }
        }
        out
    }
}

impl Div for Taylor2 {
    type Output = Taylor2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Taylor2) -> Taylor2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Taylor2 {
    type Output = Taylor2;
    fn add(mut self, rhs: f64) -> Taylor2 {
        self.v += rhs;
        self
    }
}

impl Sub<f64> for Taylor2 {
    type Output = Taylor2;
    fn sub(mut self, rhs: f64) -> Taylor2 {
        self.v -= rhs;
        self
    }
}

impl Mul<f64> for Taylor2 {
    type Output = Taylor2;
    fn mul(mut self, rhs: f64) -> Taylor2 {
        let n = self.nvars;
        self.v *= rhs;
        for i in 0..n {
            self.g[i] *= rhs;
        }
        for p in 0..n * (n + 1) / 2 {
            self.h[p] *= rhs;
        }
        self
    }
}

impl Div<f64> for Taylor2 {
    type Output = Taylor2;
    fn div(self, rhs: f64) -> Taylor2 {
        self * (1.0 / rhs)
    }
}

impl Real for Taylor2 {
    fn cst(c: f64) -> Self {
        Taylor2::constant(c)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Taylor2::constant(1.0),
            1 => self,
            2 => self * self,
            _ => {
                let nf = n as f64;
                self.chain(
                    self.v.powi(n),
                    nf * self.v.powi(n - 1),
                    nf * (nf - 1.0) * self.v.powi(n - 2),
                )
            }
        }
    }
}

/// First-order jet over an arbitrary [`Real`] coefficient ring.
#[derive(Clone, Copy, Debug)]
pub struct Tangent<T: Real> {
    nvars: usize,
    pub v: T,
    pub d: [T; MAX_VARS],
}

impl<T: Real> Tangent<T> {
    pub fn constant(c: T) -> Self {
        Tangent {
            nvars: 0,
            v: c,
            d: [T::cst(0.0); MAX_VARS],
        }
    }

    pub fn variable(nvars: usize, i: usize, value: T) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} jet variables");
        let mut t = Tangent::constant(value);
        t.nvars = nvars;
        t.d[i] = T::cst(1.0);
        t
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    fn scale_d(self, v: T, f1: T) -> Self {
        let mut out = Tangent::constant(v);
        out.nvars = self.nvars;
        for i in 0..self.nvars {
            out.d[i] = self.d[i] * f1;
        }
        out
    }
}

impl<T: Real> Add for Tangent<T> {
    type Output = Tangent<T>;
    fn add(mut self, rhs: Self) -> Self {
        let n = self.nvars.max(rhs.nvars);
        self.nvars = n;
        self.v = self.v + rhs.v;
        for i in 0..n {
            self.d[i] = self.d[i] + rhs.d[i];
        }
        self
    }
}

impl<T: Real> Sub for Tangent<T> {
    type Output = Tangent<T>;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Tangent<T> {
    type Output = Tangent<T>;
    fn neg(mut self) -> Self {
        self.v = -self.v;
        for i in 0..self.nvars {
            self.d[i] = -self.d[i];
        }
        self
    }
}

impl<T: Real> Mul for Tangent<T> {
    type Output = Tangent<T>;
    fn mul(self, rhs: Self) -> Self {
        let n = self.nvars.max(rhs.nvars);
        let mut out = Tangent::constant(self.v * rhs.v);
        out.nvars = n;
        for i in 0..n {
            out.d[i] = self.v * rhs.d[i] + rhs.v * self.d[i];
        }
        out
    }
}

impl<T: Real> Div for Tangent<T> {
    type Output = Tangent<T>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Real> Add<f64> for Tangent<T> {
    type Output = Tangent<T>;
    fn add(mut self, rhs: f64) -> Self {
        self.v = self.v + rhs;
        self
    }
}

impl<T: Real> Sub<f64> for Tangent<T> {
    type Output = Tangent<T>;
    fn sub(mut self, rhs: f64) -> Self {
        self.v = self.v - rhs;
        self
    }
}

impl<T: Real> Mul<f64> for Tangent<T> {
    type Output = Tangent<T>;
    fn mul(mut self, rhs: f64) -> Self {
        self.v = self.v * rhs;
        for i in 0..self.nvars {
            self.d[i] = self.d[i] * rhs;
        }
        self
    }
}

impl<T: Real> Div<f64> for Tangent<T> {
    type Output = Tangent<T>;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl<T: Real> Real for Tangent<T> {
    fn cst(c: f64) -> Self {
        Tangent::constant(T::cst(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn sin(self) -> Self {
        self.scale_d(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.scale_d(self.v.cos(), -self.v.sin())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.scale_d(s, s.recip() * 0.5)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.scale_d(e, e)
    }
    fn ln(self) -> Self {
        self.scale_d(self.v.ln(), self.v.recip())
    }
    fn recip(self) -> Self {
        let r = self.v.recip();
        self.scale_d(r, -(r * r))
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Tangent::cst(1.0),
            1 => self,
            _ => self.scale_d(self.v.powi(n), self.v.powi(n - 1) * n as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Taylor2::variable(2, 0, 1.5);
        let y = Taylor2::variable(2, 1, -0.5);
        // f = x^2 y / (1 + y^2)
        let f = x * x * y / (y * y + 1.0);
        let q = 1.0 + 0.25;
        assert!((f.value() - 1.5 * 1.5 * -0.5 / q).abs() < 1e-15);
        assert!((f.grad(0) - 2.0 * 1.5 * -0.5 / q).abs() < 1e-15);
        // d/dy [y/(1+y^2)] = (1 - y^2)/(1+y^2)^2
        assert!((f.grad(1) - 2.25 * (1.0 - 0.25) / (q * q)).abs() < 1e-14);
        assert!((f.hess(0, 0) - 2.0 * -0.5 / q).abs() < 1e-15);
        assert!((f.hess(0, 1) - 3.0 * 0.75 / (q * q)).abs() < 1e-14);
        assert_eq!(f.hess(0, 1), f.hess(1, 0));
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x = Taylor2::variable(1, 0, 0.7);
        let s = x.sin();
        assert!((s.grad(0) - 0.7f64.cos()).abs() < 1e-15);
        assert!((s.hess(0, 0) + 0.7f64.sin()).abs() < 1e-15);
        let r = x.sqrt();
        assert!((r.hess(0, 0) + 0.25 * 0.7f64.powf(-1.5)).abs() < 1e-14);
        let l = x.ln();
        assert!((l.hess(0, 0) + 1.0 / 0.49).abs() < 1e-13);
        let p = x.powi(5);
        assert!((p.hess(0, 0) - 20.0 * 0.7f64.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn powers_at_zero_are_exact() {
        let x = Taylor2::variable(1, 0, 0.0);
        assert_eq!(x.powi(0).value(), 1.0);
        assert_eq!(x.powi(0).grad(0), 0.0);
        assert_eq!(x.powi(2).hess(0, 0), 2.0);
        assert_eq!(x.powi(3).hess(0, 0), 0.0);
    }

    #[test]
    fn nested_tangent_gives_third_derivatives() {
        // f(x) = sin(x) x^2; f''' = -cos x x^2 - 6 sin x + 6 cos x ... check via
        // the Tangent derivative's Hessian.
        let x0 = 0.4f64;
        let inner = Taylor2::variable(1, 0, x0);
        let x = Tangent::variable(1, 0, inner);
        let f = x.sin() * x * x;
        let fppp = -x0.cos() * x0 * x0 - 6.0 * x0 * x0.sin() + 6.0 * x0.cos();
        let fp = x0.cos() * x0 * x0 + 2.0 * x0 * x0.sin();
        assert!((f.d[0].value() - fp).abs() < 1e-15);
        assert!((f.d[0].hess(0, 0) - fppp).abs() < 1e-14);
    }
}
