//! Fully antisymmetric tensors (multivector fields and differential forms)
//! with jet-valued components.
//!
//! Components are stored once per increasing index set, so a `q`-vector is
//! `Q = Σ_{i1<…<iq} Q^{i1…iq} ∂_{i1}∧…∧∂_{iq}` and likewise for forms. Index
//! sets are bitmasks; storage follows the numeric order of the masks, which
//! is the colexicographic order of the index sets.

use std::fmt;
use std::marker::PhantomData;

use crate::expr::Jet2;

/// Marker for contravariant (multivector) slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectors {}
/// Marker for covariant (form) slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Covectors {}

pub type Multivector = Alternating<Vectors>;
pub type Form = Alternating<Covectors>;

pub struct Alternating<K> {
    dim: usize,
    degree: usize,
    comps: Vec<Jet2>,
    _kind: PhantomData<K>,
}

impl<K> Clone for Alternating<K> {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.clone(),
            _kind: PhantomData,
        }
    }
}

impl<K> fmt::Debug for Alternating<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (mask, c) in self.iter() {
            m.entry(&indices(mask), &c.value());
        }
        m.finish()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Index sets of size `degree` in `0..dim`, as bitmasks in storage order.
pub fn masks(dim: usize, degree: usize) -> Vec<u32> {
    (0u32..(1u32 << dim))
        .filter(|m| m.count_ones() as usize == degree)
        .collect()
}

fn rank(mask: u32) -> usize {
    let mut r = 0;
    let mut t = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        t += 1;
        r += binomial(i, t);
        m &= m - 1;
    }
    r
}

/// Increasing indices of a mask.
pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sorts an index tuple, returning `(sign, mask)`, or `None` on a repeat.
pub fn sort_indices(idx: &[usize]) -> Option<(f64, u32)> {
    let mut mask = 0u32;
    let mut inversions = 0;
    for (a, &i) in idx.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        inversions += idx[..a].iter().filter(|&&j| j > i).count();
    }
    Some((if inversions % 2 == 0 { 1.0 } else { -1.0 }, mask))
}

/// Sign of `dx^A ∧ dx^B` relative to `dx^{A∪B}` (disjoint `A`, `B`).
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0;
    for j in indices(b) {
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl<K> Alternating<K> {
    /// The zero element; above the dimension it has no components.
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            comps: vec![Jet2::constant(dim, 0.0); binomial(dim, degree)],
            _kind: PhantomData,
        }
    }

    /// A degree-0 element.
    pub fn scalar(value: Jet2) -> Self {
        let mut s = Self::zero(value.dim(), 0);
        s.comps[0] = value;
        s
    }

    /// A degree-1 element from its components.
    pub fn from_components(c: &[Jet2]) -> Self {
        let mut s = Self::zero(c.len(), 1);
        for (i, v) in c.iter().enumerate() {
            s.set(&[i], *v);
        }
        s
    }

    /// A bivector or 2-form from a full antisymmetric `dim × dim` array.
    pub fn from_matrix(dim: usize, m: &[Jet2]) -> Self {
        let mut s = Self::zero(dim, 2);
        for i in 0..dim {
            for j in i + 1..dim {
                s.set(&[i, j], m[i * dim + j]);
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component for an arbitrary index tuple (sign applied, zero on repeats).
    pub fn get(&self, idx: &[usize]) -> Jet2 {
        debug_assert_eq!(idx.len(), self.degree);
        match sort_indices(idx) {
            Some((sign, mask)) => self.comps[rank(mask)].scale(sign),
            None => Jet2::constant(self.dim, 0.0),
        }
    }

    /// Sets the component for `idx` (antisymmetry is implied).
    pub fn set(&mut self, idx: &[usize], v: Jet2) {
        let (sign, mask) = sort_indices(idx).expect("repeated index");
        self.comps[rank(mask)] = v.scale(sign);
    }

    pub fn by_mask(&self, mask: u32) -> Jet2 {
        self.comps[rank(mask)]
    }

    fn add_to(&mut self, mask: u32, v: Jet2) {
        let r = rank(mask);
        self.comps[r] = self.comps[r] + v;
    }

    /// `(mask, component)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Jet2)> + '_ {
        masks(self.dim, self.degree)
            .into_iter()
            .zip(self.comps.iter().copied())
    }

    /// The value-level components, in storage order.
    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet2::value).collect()
    }

    /// Largest component magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Jet2) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            *c = *c * s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            *a = *a + *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Jet2::constant(self.dim, -1.0)))
    }

    /// Exterior product; both factors of the same kind.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                if a & b == 0 {
                    out.add_to(a | b, (x * y).scale(merge_sign(a, b)));
                }
            }
        }
        out
    }

    /// The single component of a degree-0 element.
    pub fn as_scalar(&self) -> Jet2 {
        assert_eq!(self.degree, 0);
        self.comps[0]
    }

    /// Components of a degree-1 element.
    pub fn as_components(&self) -> Vec<Jet2> {
        assert_eq!(self.degree, 1);
        (0..self.dim).map(|i| self.get(&[i])).collect()
    }
}

impl Multivector {
    /// `i_Q ω`, with `i_{X∧Y} = i_Y ∘ i_X`.
    pub fn interior(&self, form: &Form) -> Form {
        assert_eq!(self.dim, form.dim);
        assert!(self.degree <= form.degree);
        let mut out = Form::zero(self.dim, form.degree - self.degree);
        for (q, qc) in self.iter() {
            for (w, wc) in form.iter() {
                if q & w != q {
                    continue;
                }
                // contract ∂_{i1}, then ∂_{i2}, … (increasing order)
                let mut rest = w;
                let mut sign = 1.0;
                for i in indices(q) {
                    if (rest & ((1 << i) - 1)).count_ones() % 2 == 1 {
                        sign = -sign;
                    }
                    rest &= !(1 << i);
                }
                out.add_to(rest, (qc * wc).scale(sign));
            }
        }
        out
    }

    /// Lie derivative `[X, Q]` along a vector field with first-order jets.
    pub fn lie_derivative(&self, x: &[Jet2]) -> Multivector {
        let n = self.dim;
        let mut out = Multivector::zero(n, self.degree);
        for (mask, qc) in self.iter() {
            let idx = indices(mask);
            let mut acc = Jet2::constant(n, 0.0);
            for k in 0..n {
                acc += x[k] * qc.partial(k);
            }
            for m in 0..idx.len() {
                for k in 0..n {
                    let mut moved = idx.clone();
                    moved[m] = k;
                    acc -= self.get(&moved) * x[idx[m]].partial(k);
                }
            }
            out.comps[rank(mask)] = acc;
        }
        out
    }
}

impl Form {
    /// Exterior derivative; components lose one jet order.
    pub fn d(&self) -> Form {
        let n = self.dim;
        let mut out = Form::zero(n, self.degree + 1);
        for (mask, c) in self.iter() {
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let sign = merge_sign(1 << k, mask);
                out.add_to(mask | (1 << k), c.partial(k).scale(sign));
            }
        }
        out
    }

    /// Lie derivative `L_X ω` from the coordinate formula.
    pub fn lie_derivative(&self, x: &[Jet2]) -> Form {
        let n = self.dim;
        let mut out = Form::zero(n, self.degree);
        for (mask, wc) in self.iter() {
            let idx = indices(mask);
            let mut acc = Jet2::constant(n, 0.0);
            for k in 0..n {
                acc += x[k] * wc.partial(k);
            }
            for m in 0..idx.len() {
                for k in 0..n {
                    let mut moved = idx.clone();
                    moved[m] = k;
                    acc += self.get(&moved) * x[k].partial(idx[m]);
                }
            }
            out.comps[rank(mask)] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(dim: usize, v: f64) -> Jet2 {
        Jet2::constant(dim, v)
    }

    #[test]
    fn ranks_follow_mask_order() {
        for dim in 1..=6 {
            for deg in 0..=dim {
                for (r, m) in masks(dim, deg).into_iter().enumerate() {
                    assert_eq!(rank(m), r);
                }
            }
        }
    }

    #[test]
    fn sorting_signs() {
        assert_eq!(sort_indices(&[0, 1, 2]), Some((1.0, 0b111)));
        assert_eq!(sort_indices(&[1, 0, 2]), Some((-1.0, 0b111)));
        assert_eq!(sort_indices(&[2, 0, 1]), Some((1.0, 0b111)));
        assert_eq!(sort_indices(&[1, 1]), None);
    }

    #[test]
    fn interior_signs_in_three_dimensions() {
        let mut mu = Form::zero(3, 3);
        mu.set(&[0, 1, 2], c(3, 1.0));
        let mut pi = Multivector::zero(3, 2);
        pi.set(&[0, 1], c(3, 1.0));
        // i_{∂x∧∂y} μ = dz
        assert_eq!(pi.interior(&mu).get(&[2]).value(), 1.0);
        let dy = Multivector::from_components(&[c(3, 0.0), c(3, 1.0), c(3, 0.0)]);
        // i_{∂y} μ = -dx∧dz
        let w = dy.interior(&mu);
        assert_eq!(w.get(&[0, 2]).value(), -1.0);
        assert_eq!(w.get(&[0, 1]).value(), 0.0);
    }

    #[test]
    fn wedge_of_symplectic_pair() {
        let mut pi = Multivector::zero(4, 2);
        pi.set(&[0, 1], c(4, 1.0));
        pi.set(&[2, 3], c(4, 1.0));
        let pp = pi.wedge(&pi);
        assert_eq!(pp.get(&[0, 1, 2, 3]).value(), 2.0);
    }

    #[test]
    fn exterior_derivative_of_oneforms() {
        // α = x dy on ℝ²
        let x = Jet2::variable(2, 0, 0.3);
        let a = Form::from_components(&[c(2, 0.0), x]);
        assert_eq!(a.d().get(&[0, 1]).value(), 1.0);
        // α = y dx
        let y = Jet2::variable(2, 1, 0.7);
        let b = Form::from_components(&[y, c(2, 0.0)]);
        assert_eq!(b.d().get(&[0, 1]).value(), -1.0);
    }
}
