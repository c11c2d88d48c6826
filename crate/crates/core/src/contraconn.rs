//! The Koszul bracket on 1-forms and the metric contravariant connection `D`
//! of a pair `(π, g)`, with the diagnostics built on it.
//!
//! `D_αβ` is obtained from the Koszul formula
//!
//! ```text
//! 2⟨D_αβ, γ⟩ = π_#(α)·⟨β,γ⟩ + π_#(β)·⟨α,γ⟩ − π_#(γ)·⟨α,β⟩
//!            + ⟨[γ,α]_π, β⟩ + ⟨[γ,β]_π, α⟩ + ⟨[α,β]_π, γ⟩
//! ```
//!
//! evaluated against `γ = dx^k` and solved with the metric. The whole
//! assembly runs in jet arithmetic, so `D_αβ` is again a field with jets
//! (one order lower than its inputs) and can be fed back into `D`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::Jet2;
use crate::fields::{
    anchor, directional, inner_covectors, lie_derivative_bivector, pi_pair, raise, PointFrame,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error(
        "numerical rank of π is ambiguous at {point:?}: singular value {sigma:e} lies within a \
         decade above the threshold {threshold:e}"
    )]
    RankAmbiguous {
        point: Vec<f64>,
        sigma: f64,
        threshold: f64,
    },
}

/// Default relative singular-value threshold for kernel extraction.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

fn zero(n: usize) -> Jet2 {
    Jet2::constant(n, 0.0)
}

/// `(L_X β)_i = X^k ∂_k β_i + β_k ∂_i X^k`.
fn lie_oneform(x: &[Jet2], beta: &[Jet2]) -> Vec<Jet2> {
    let n = beta.len();
    (0..n)
        .map(|i| {
            let mut acc = directional(x, &beta[i]);
            for k in 0..n {
                acc += beta[k] * x[k].partial(i);
            }
            acc
        })
        .collect()
}

/// `[α, β]_π = L_{π_#α} β − L_{π_#β} α − d(π(α, β))`.
pub fn koszul_bracket(fr: &PointFrame, alpha: &[Jet2], beta: &[Jet2]) -> Vec<Jet2> {
    let a = lie_oneform(&anchor(fr, alpha), beta);
    let b = lie_oneform(&anchor(fr, beta), alpha);
    let p = pi_pair(fr, alpha, beta);
    (0..fr.dim()).map(|i| a[i] - b[i] - p.partial(i)).collect()
}

/// `D_αβ` of the metric contravariant connection.
///
/// Both arguments are 1-form fields given by component jets; `α` enters
/// tensorially, so a constant-coefficient field represents a bare covector.
pub fn metric_d(fr: &PointFrame, alpha: &[Jet2], beta: &[Jet2]) -> Vec<Jet2> {
    let n = fr.dim();
    let pa = anchor(fr, alpha);
    let pb = anchor(fr, beta);
    let ab = inner_covectors(fr, alpha, beta);
    let bracket_ab = koszul_bracket(fr, alpha, beta);
    let mut rhs = Vec::with_capacity(n);
    for k in 0..n {
        let gamma = fr.basis_covector(k);
        let pg = anchor(fr, &gamma);
        let mut v = directional(&pa, &inner_covectors(fr, beta, &gamma))
            + directional(&pb, &inner_covectors(fr, alpha, &gamma))
            - directional(&pg, &ab);
        v += inner_covectors(fr, &koszul_bracket(fr, &gamma, alpha), beta);
        v += inner_covectors(fr, &koszul_bracket(fr, &gamma, beta), alpha);
        v += inner_covectors(fr, &bracket_ab, &gamma);
        rhs.push(v);
    }
    // 2 g^{kl} (D_αβ)_l = rhs^k  ⇒  (D_αβ)_j = ½ g_{jk} rhs^k
    (0..n)
        .map(|j| (0..n).fold(zero(n), |acc, k| acc + fr.g(j, k) * rhs[k]).scale(0.5))
        .collect()
}

/// `K(α,β)γ = D_α D_β γ − D_β D_α γ − D_{[α,β]_π} γ`.
///
/// Inputs need second-order jets; the result is value-accurate.
pub fn curvature(fr: &PointFrame, alpha: &[Jet2], beta: &[Jet2], gamma: &[Jet2]) -> Vec<Jet2> {
    let dbg = metric_d(fr, beta, gamma);
    let dag = metric_d(fr, alpha, gamma);
    let a = metric_d(fr, alpha, &dbg);
    let b = metric_d(fr, beta, &dag);
    let c = metric_d(fr, &koszul_bracket(fr, alpha, beta), gamma);
    (0..fr.dim()).map(|i| a[i] - b[i] - c[i]).collect()
}

fn sup(v: &[Jet2]) -> f64 {
    v.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
}

/// Torsion `D_αβ − D_βα − [α,β]_π`.
pub fn torsion_residual(fr: &PointFrame, alpha: &[Jet2], beta: &[Jet2]) -> f64 {
    let a = metric_d(fr, alpha, beta);
    let b = metric_d(fr, beta, alpha);
    let k = koszul_bracket(fr, alpha, beta);
    (0..fr.dim())
        .map(|i| (a[i] - b[i] - k[i]).value().abs())
        .fold(0.0, f64::max)
}

/// Metric compatibility `π_#(α)·⟨β,γ⟩ − ⟨D_αβ,γ⟩ − ⟨β,D_αγ⟩`.
pub fn metric_compat_residual(fr: &PointFrame, alpha: &[Jet2], beta: &[Jet2], gamma: &[Jet2]) -> f64 {
    let lhs = directional(&anchor(fr, alpha), &inner_covectors(fr, beta, gamma));
    let r1 = inner_covectors(fr, &metric_d(fr, alpha, beta), gamma);
    let r2 = inner_covectors(fr, beta, &metric_d(fr, alpha, gamma));
    (lhs - r1 - r2).value().abs()
}

/// `max |π_#(α)·π(β,γ) − π(D_αβ,γ) − π(β,D_αγ)|` over coordinate covectors.
pub fn d_pi_residual(fr: &PointFrame) -> f64 {
    let n = fr.dim();
    let basis: Vec<Vec<Jet2>> = (0..n).map(|k| fr.basis_covector(k)).collect();
    let mut worst = 0.0f64;
    for a in &basis {
        let pa = anchor(fr, a);
        let d: Vec<Vec<Jet2>> = basis.iter().map(|b| metric_d(fr, a, b)).collect();
        for (bi, b) in basis.iter().enumerate() {
            for (ci, c) in basis.iter().enumerate().skip(bi + 1) {
                let v = directional(&pa, &pi_pair(fr, b, c))
                    - pi_pair(fr, &d[bi], c)
                    - pi_pair(fr, b, &d[ci]);
                worst = worst.max(v.value().abs());
            }
        }
    }
    worst
}

/// Numerical rank of `π(p)` and an orthonormal (Euclidean) basis of the
/// kernel of `π_#`, from the singular values of `π(p)`.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    pub rank: usize,
    pub kernel: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
}

/// Splits the singular values of `π(p)` at `rank_tol · σ_max`. A singular
/// value within one decade above the threshold makes the split ambiguous.
pub fn kernel_split(fr: &PointFrame, rank_tol: f64) -> Result<KernelSplit, ConnectionError> {
    let n = fr.dim();
    let p: DMatrix<f64> = fr.pi_values();
    let svd = p.svd(false, true);
    let sigma = svd.singular_values.clone();
    let v_t = svd.v_t.expect("requested");
    let smax = sigma.iter().fold(0.0f64, |a, s| a.max(*s));
    if smax == 0.0 {
        let kernel = (0..n)
            .map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
            .collect();
        return Ok(KernelSplit {
            rank: 0,
            kernel,
            singular_values: sigma.iter().copied().collect(),
        });
    }
    let threshold = rank_tol * smax;
    let mut kernel = Vec::new();
    let mut rank = 0;
    for (k, s) in sigma.iter().enumerate() {
        if *s > threshold && *s < 10.0 * threshold {
            return Err(ConnectionError::RankAmbiguous {
                point: fr.point().to_vec(),
                sigma: *s,
                threshold,
            });
        }
        if *s <= threshold {
            kernel.push(v_t.row(k).iter().copied().collect());
        } else {
            rank += 1;
        }
    }
    Ok(KernelSplit {
        rank,
        kernel,
        singular_values: sigma.iter().copied().collect(),
    })
}

/// `g`-norm of a covector value.
fn g_norm(fr: &PointFrame, a: &[Jet2]) -> f64 {
    inner_covectors(fr, a, a).value().max(0.0).sqrt()
}

/// `max ‖D_αβ‖_g` over a kernel basis `α` of `π_#` and coordinate fields
/// `β = dx^k`; zero exactly when `D_α = 0` for every `α ∈ Ker π_#` at the
/// point.
pub fn f_connection_residual(fr: &PointFrame, rank_tol: f64) -> Result<f64, ConnectionError> {
    let split = kernel_split(fr, rank_tol)?;
    let mut worst = 0.0f64;
    for a in &split.kernel {
        let alpha = fr.constant_field(a);
        for k in 0..fr.dim() {
            let d = metric_d(fr, &alpha, &fr.basis_covector(k));
            worst = worst.max(g_norm(fr, &d));
        }
    }
    Ok(worst)
}

/// `|L_{#α}π(β,γ) − ⟨D_γα,β⟩ + ⟨D_βα,γ⟩|` for a 1-form field `α` and
/// covectors `β`, `γ` (extended as constant fields).
pub fn formula1_residual(fr: &PointFrame, alpha: &[Jet2], beta: &[f64], gamma: &[f64]) -> f64 {
    let b = fr.constant_field(beta);
    let c = fr.constant_field(gamma);
    let lie = lie_derivative_bivector(fr, &raise(fr, alpha));
    let mut lhs = zero(fr.dim());
    for (mask, v) in lie.iter() {
        let idx = crate::fields::alternating::indices(mask);
        let (i, j) = (idx[0], idx[1]);
        lhs += v * (b[i] * c[j] - b[j] * c[i]);
    }
    let r = inner_covectors(fr, &metric_d(fr, &c, alpha), &b)
        - inner_covectors(fr, &metric_d(fr, &b, alpha), &c);
    (lhs - r).value().abs()
}

/// Sup-norm of a list of component jets.
pub fn sup_norm(v: &[Jet2]) -> f64 {
    sup(v)
}
