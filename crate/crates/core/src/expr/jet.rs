//! Second-order jets: value, gradient and symmetric Hessian of a scalar at a
//! point, propagated through arithmetic by the product and chain rules.
//!
//! Every jet carries an `order`. Differentiating a jet with [`Jet2::partial`]
//! lowers it by one, and binary operations keep the smaller order of their
//! operands, so a quantity assembled from first derivatives of the inputs
//! still has a trustworthy gradient while its Hessian is marked unavailable.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest chart dimension supported by the dense jet storage.
pub const MAX_DIM: usize = 8;
const HESS_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn hidx(i: usize, j: usize) -> usize {
    let (a, b) = if i >= j { (i, j) } else { (j, i) };
    a * (a + 1) / 2 + b
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    dim: u8,
    order: u8,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [f64; HESS_LEN],
}

impl Jet2 {
    /// A constant: exact to every order.
    pub fn constant(dim: usize, value: f64) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds MAX_DIM = {MAX_DIM}");
        Self {
            dim: dim as u8,
            order: 2,
            value,
            grad: [0.0; MAX_DIM],
            hess: [0.0; HESS_LEN],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(dim: usize, index: usize, value: f64) -> Self {
        assert!(index < dim);
        let mut j = Self::constant(dim, value);
        j.grad[index] = 1.0;
        j
    }

    /// Builds a jet from explicit parts. `hess` is read as a dense row-major
    /// `dim × dim` matrix and symmetrized.
    pub fn from_parts(value: f64, grad: &[f64], hess: Option<&[f64]>) -> Self {
        let dim = grad.len();
        let mut j = Self::constant(dim, value);
        j.grad[..dim].copy_from_slice(grad);
        match hess {
            Some(h) => {
                assert_eq!(h.len(), dim * dim);
                for a in 0..dim {
                    for b in 0..=a {
                        j.hess[hidx(a, b)] = 0.5 * (h[a * dim + b] + h[b * dim + a]);
                    }
                }
            }
            None => j.order = 1,
        }
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Number of trustworthy derivative levels (0, 1 or 2).
    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn grad(&self) -> &[f64] {
        debug_assert!(self.order >= 1, "gradient of an order-0 jet");
        &self.grad[..self.dim()]
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.order >= 2, "Hessian of a jet of order {}", self.order);
        self.hess[hidx(i, j)]
    }

    /// Dense Hessian, `None` when it is not available at this order.
    pub fn hessian(&self) -> Option<Vec<Vec<f64>>> {
        (self.order >= 2).then(|| {
            let n = self.dim();
            (0..n)
                .map(|i| (0..n).map(|j| self.hess[hidx(i, j)]).collect())
                .collect()
        })
    }

    /// `∂_k` of this jet, one order lower.
    pub fn partial(&self, k: usize) -> Self {
        assert!(
            self.order >= 1,
            "cannot differentiate a value-only jet (order 0)"
        );
        let n = self.dim();
        let mut out = Self::constant(n, self.grad[k]);
        out.order = self.order - 1;
        if out.order >= 1 {
            for i in 0..n {
                out.grad[i] = self.hess[hidx(k, i)];
            }
        }
        out
    }

    /// Forgets derivative information above `order`.
    pub fn truncate(mut self, order: u8) -> Self {
        if order < self.order {
            self.order = order;
            if order < 2 {
                self.hess = [0.0; HESS_LEN];
            }
            if order < 1 {
                self.grad = [0.0; MAX_DIM];
            }
        }
        self
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let mut out = Self::constant(n, f0);
        out.order = self.order;
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = f1 * self.grad[i];
            }
        }
        if self.order >= 2 {
            for a in 0..n {
                for b in 0..=a {
                    let k = hidx(a, b);
                    out.hess[k] = f1 * self.hess[k] + f2 * self.grad[a] * self.grad[b];
                }
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    /// Valid away from zero only.
    pub fn abs(&self) -> Self {
        let sg = self.value.signum();
        self.compose(self.value.abs(), sg, 0.0)
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// Integer power, exact for every base (negative exponents need a
    /// nonzero base).
    pub fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let nf = f64::from(n);
        match n {
            0 => self.compose(1.0, 0.0, 0.0),
            1 => *self,
            _ => self.compose(
                v.powi(n),
                nf * v.powi(n - 1),
                nf * (nf - 1.0) * v.powi(n - 2),
            ),
        }
    }

    /// Real power with a positive base.
    pub fn powf(&self, p: f64) -> Self {
        let v = self.value;
        self.compose(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    /// `self^e` for a jet-valued exponent and a positive base.
    pub fn pow(&self, e: &Self) -> Self {
        (*e * self.ln()).exp()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.value *= s;
        for g in out.grad.iter_mut() {
            *g *= s;
        }
        for h in out.hess.iter_mut() {
            *h *= s;
        }
        out
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Jet2");
        s.field("value", &self.value);
        if self.order >= 1 {
            s.field("grad", &self.grad());
        }
        if let Some(h) = self.hessian() {
            s.field("hess", &h);
        }
        s.finish()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let order = self.order.min(rhs.order);
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad.iter()) {
            *a += b;
        }
        for (a, b) in self.hess.iter_mut().zip(rhs.hess.iter()) {
            *a += b;
        }
        self.truncate(order)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let n = self.dim();
        let mut out = Jet2::constant(n, self.value * rhs.value);
        out.order = self.order.min(rhs.order);
        if out.order >= 1 {
            for i in 0..n {
                out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
            }
        }
        if out.order >= 2 {
            for a in 0..n {
                for b in 0..=a {
                    let k = hidx(a, b);
                    out.hess[k] = self.value * rhs.hess[k]
                        + rhs.value * self.hess[k]
                        + self.grad[a] * rhs.grad[b]
                        + self.grad[b] * rhs.grad[a];
                }
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self.scale(1.0 / rhs)
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}
