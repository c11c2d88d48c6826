//! Pointwise tensor calculus on a [`PointFrame`].
//!
//! Vector and covector fields are passed as component jets. Each derivative
//! taken inside an operation lowers the jet order of its result by one; the
//! frame itself is evaluated to order two.

use crate::expr::Jet2;

use super::alternating::{Form, Multivector};
use super::frame::PointFrame;
use super::FieldError;

fn zero(n: usize) -> Jet2 {
    Jet2::constant(n, 0.0)
}

/// `π_#(α)`, fixed by `β(π_#α) = π(α, β)`: `(π_#α)^j = π^{ij} α_i`.
pub fn anchor(fr: &PointFrame, alpha: &[Jet2]) -> Vec<Jet2> {
    let n = fr.dim();
    (0..n)
        .map(|j| (0..n).fold(zero(n), |acc, i| acc + fr.pi(i, j) * alpha[i]))
        .collect()
}

/// Value-level anchor map.
pub fn anchor_value(fr: &PointFrame, alpha: &[f64]) -> Vec<f64> {
    let n = fr.dim();
    (0..n)
        .map(|j| (0..n).map(|i| fr.pi(i, j).value() * alpha[i]).sum())
        .collect()
}

/// `#α`: `(#α)^i = g^{ij} α_j`.
pub fn raise(fr: &PointFrame, alpha: &[Jet2]) -> Vec<Jet2> {
    let n = fr.dim();
    (0..n)
        .map(|i| (0..n).fold(zero(n), |acc, j| acc + fr.g_inv(i, j) * alpha[j]))
        .collect()
}

/// `X♭`: `(X♭)_i = g_{ij} X^j`.
pub fn lower(fr: &PointFrame, x: &[Jet2]) -> Vec<Jet2> {
    let n = fr.dim();
    (0..n)
        .map(|i| (0..n).fold(zero(n), |acc, j| acc + fr.g(i, j) * x[j]))
        .collect()
}

/// `⟨α, β⟩ = g^{ij} α_i β_j`.
pub fn inner_covectors(fr: &PointFrame, a: &[Jet2], b: &[Jet2]) -> Jet2 {
    let n = fr.dim();
    let mut acc = zero(n);
    for i in 0..n {
        for j in 0..n {
            acc += fr.g_inv(i, j) * a[i] * b[j];
        }
    }
    acc
}

/// `g(X, Y)`.
pub fn inner_vectors(fr: &PointFrame, x: &[Jet2], y: &[Jet2]) -> Jet2 {
    let n = fr.dim();
    let mut acc = zero(n);
    for i in 0..n {
        for j in 0..n {
            acc += fr.g(i, j) * x[i] * y[j];
        }
    }
    acc
}

/// Metric norm of a covector value.
pub fn covector_norm(fr: &PointFrame, a: &[f64]) -> f64 {
    let n = fr.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += fr.g_inv(i, j).value() * a[i] * a[j];
        }
    }
    s.max(0.0).sqrt()
}

/// `π(α, β) = π^{ij} α_i β_j`.
pub fn pi_pair(fr: &PointFrame, a: &[Jet2], b: &[Jet2]) -> Jet2 {
    let n = fr.dim();
    let mut acc = zero(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += fr.pi(i, j) * a[i] * b[j];
            }
        }
    }
    acc
}

/// `df` as component jets.
pub fn differential(f: &Jet2) -> Vec<Jet2> {
    (0..f.dim()).map(|k| f.partial(k)).collect()
}

/// `X(h) = X^k ∂_k h`.
pub fn directional(x: &[Jet2], h: &Jet2) -> Jet2 {
    x.iter()
        .enumerate()
        .fold(zero(h.dim()), |acc, (k, xk)| acc + *xk * h.partial(k))
}

/// `[X, Y]^i = X^k ∂_k Y^i − Y^k ∂_k X^i`.
pub fn vector_bracket(x: &[Jet2], y: &[Jet2]) -> Vec<Jet2> {
    (0..x.len())
        .map(|i| directional(x, &y[i]) - directional(y, &x[i]))
        .collect()
}

/// Hamiltonian field `H_f = π_#(df)`, so `H_f(h) = {f, h}`.
pub fn hamiltonian_field(fr: &PointFrame, f: &Jet2) -> Vec<Jet2> {
    anchor(fr, &differential(f))
}

/// Gradient `∇f = #(df)`.
pub fn gradient(fr: &PointFrame, f: &Jet2) -> Vec<Jet2> {
    raise(fr, &differential(f))
}

/// Schouten bracket `[π, π]` normalized so that
/// `[π,π](df, dg, dh) = 2({{f,g},h} + {{g,h},f} + {{h,f},g})`:
/// `[π,π]^{ijk} = −2 Σ_l (π^{il} ∂_l π^{jk} + π^{jl} ∂_l π^{ki} + π^{kl} ∂_l π^{ij})`.
pub fn jacobi_trivector(fr: &PointFrame) -> Multivector {
    let n = fr.dim();
    let mut out = Multivector::zero(n, 3);
    let term = |a: usize, b: usize, c: usize| {
        (0..n).fold(zero(n), |acc, l| acc + fr.pi(a, l) * fr.pi(b, c).partial(l))
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = term(i, j, k) + term(j, k, i) + term(k, i, j);
                out.set(&[i, j, k], v.scale(-2.0));
            }
        }
    }
    out
}

/// `[X, π]`.
pub fn lie_derivative_bivector(fr: &PointFrame, x: &[Jet2]) -> Multivector {
    fr.pi_multivector().lie_derivative(x)
}

/// `(L_X g)_{ij} = X^k ∂_k g_{ij} + g_{kj} ∂_i X^k + g_{ik} ∂_j X^k`, row-major.
pub fn lie_derivative_metric(fr: &PointFrame, x: &[Jet2]) -> Vec<Jet2> {
    let n = fr.dim();
    let mut out = vec![zero(n); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = directional(x, &fr.g(i, j));
            for k in 0..n {
                acc += fr.g(k, j) * x[k].partial(i) + fr.g(i, k) * x[k].partial(j);
            }
            out[i * n + j] = acc;
            out[j * n + i] = acc;
        }
    }
    out
}

/// Density `√det g` of the Riemannian volume.
pub fn riemannian_volume(fr: &PointFrame) -> Jet2 {
    fr.sqrt_det()
}

/// `i_Q μ` for the Riemannian volume `μ`.
pub fn interior_volume(fr: &PointFrame, q: &Multivector) -> Form {
    q.interior(&fr.volume_form())
}

/// Levi-Civita symbols `Γ^k_{ij}`.
#[derive(Debug, Clone)]
pub struct Christoffels {
    n: usize,
    data: Vec<Jet2>,
}

impl Christoffels {
    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> Jet2 {
        self.data[(k * self.n + i) * self.n + j]
    }
}

/// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn christoffels(fr: &PointFrame) -> Christoffels {
    let n = fr.dim();
    let mut lowered = vec![zero(n); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = (fr.g(j, l).partial(i) + fr.g(i, l).partial(j) - fr.g(i, j).partial(l))
                    .scale(0.5);
                lowered[(l * n + i) * n + j] = v;
                lowered[(l * n + j) * n + i] = v;
            }
        }
    }
    let mut data = vec![zero(n); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = (0..n).fold(zero(n), |acc, l| {
                    acc + fr.g_inv(k, l) * lowered[(l * n + i) * n + j]
                });
                data[(k * n + i) * n + j] = v;
                data[(k * n + j) * n + i] = v;
            }
        }
    }
    Christoffels { n, data }
}

/// Levi-Civita divergence of a `q`-vector, contracting the derivative with
/// the first slot: `(div Q)^{i2…iq} = ∇_k Q^{k i2…iq}`.
pub fn divergence(fr: &PointFrame, q: &Multivector) -> Multivector {
    let gamma = christoffels(fr);
    divergence_with(&gamma, q)
}

pub fn divergence_with(gamma: &Christoffels, q: &Multivector) -> Multivector {
    let n = q.dim();
    assert!(q.degree() >= 1, "divergence of a function");
    let mut out = Multivector::zero(n, q.degree() - 1);
    for (mask, _) in out.clone().iter() {
        let rest = super::alternating::indices(mask);
        let mut acc = zero(n);
        for k in 0..n {
            let mut idx = Vec::with_capacity(rest.len() + 1);
            idx.push(k);
            idx.extend_from_slice(&rest);
            acc += q.get(&idx).partial(k);
            for l in 0..n {
                let mut lidx = idx.clone();
                lidx[0] = l;
                acc += gamma.get(k, k, l) * q.get(&lidx);
                // remaining slots; these cancel for antisymmetric Q but are
                // kept so the contraction is the full covariant one
                for m in 1..idx.len() {
                    let mut midx = idx.clone();
                    midx[m] = l;
                    acc += gamma.get(idx[m], k, l) * q.get(&midx);
                }
            }
        }
        out.set(&rest, acc);
    }
    out
}

/// Divergence of a vector field.
pub fn divergence_vector(fr: &PointFrame, x: &[Jet2]) -> Jet2 {
    divergence(fr, &Multivector::from_components(x)).as_scalar()
}

/// `(dα)_{ij} = ∂_i α_j − ∂_j α_i` as a 2-form.
pub fn exterior_derivative_oneform(alpha: &[Jet2]) -> Form {
    Form::from_components(alpha).d()
}

/// `∧ⁿπ`.
pub fn wedge_power(fr: &PointFrame, power: usize) -> Result<Multivector, FieldError> {
    if power == 0 || 2 * power > fr.dim() {
        return Err(FieldError::Dimension(format!(
            "∧^{power} π needs 1 ≤ 2·{power} ≤ {}",
            fr.dim()
        )));
    }
    let pi = fr.pi_multivector();
    let mut acc = pi.clone();
    for _ in 1..power {
        acc = acc.wedge(&pi);
    }
    Ok(acc)
}

/// Sup-norm of a component list.
pub fn sup(v: &[Jet2]) -> f64 {
    v.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
}
