//! Residuals of the calculus identities and the finite-difference oracle.

use pkt::expr::{eval_jet2, eval_value, Jet2, ScalarExpr};
use pkt::fields::{
    differential, divergence, divergence_vector, hamiltonian_field, interior_volume, jacobi_trivector,
    lie_derivative_bivector, wedge_power, Multivector, PointFrame,
};

/// `d(i_X μ) = (div X) μ`.
pub fn volume_derivative_vector(fr: &PointFrame, x: &[Jet2]) -> f64 {
    let xm = Multivector::from_components(x);
    let lhs = interior_volume(fr, &xm).d();
    let div = divergence(fr, &xm).as_scalar();
    lhs.sub(&fr.volume_form().scale(div)).sup_norm()
}

/// `d(i_π μ) = −i_{div π} μ`.
pub fn volume_derivative_bivector(fr: &PointFrame) -> f64 {
    let pi = fr.pi_multivector();
    let lhs = interior_volume(fr, &pi).d();
    let rhs = interior_volume(fr, &divergence(fr, &pi));
    lhs.add(&rhs).sup_norm()
}

/// `⟨div π, df⟩ = −div(H_f)` with `H_f = π_#(df)` and first-slot divergence.
pub fn hamiltonian_divergence(fr: &PointFrame, f: &Jet2) -> f64 {
    let df = differential(f);
    let div_pi = divergence(fr, &fr.pi_multivector()).as_components();
    let pair = (0..fr.dim()).fold(0.0, |a, i| a + div_pi[i].value() * df[i].value());
    let div_h = divergence_vector(fr, &hamiltonian_field(fr, f)).value();
    (pair + div_h).abs()
}

/// `L_{H_f} μ = div(H_f) μ = −⟨div π, df⟩ μ`.
pub fn hamiltonian_volume(fr: &PointFrame, f: &Jet2) -> f64 {
    let h = hamiltonian_field(fr, f);
    let mu = fr.volume_form();
    let lie = mu.lie_derivative(&h);
    let df = differential(f);
    let div_pi = divergence(fr, &fr.pi_multivector()).as_components();
    let pair = (0..fr.dim()).fold(Jet2::constant(fr.dim(), 0.0), |a, i| a + div_pi[i] * df[i]);
    let first = lie.sub(&mu.scale(divergence_vector(fr, &h))).sup_norm();
    let second = lie.add(&mu.scale(pair)).sup_norm();
    first.max(second)
}

/// `i_{[π,π]} μ = −(d i_{π∧π} μ − 2 i_π d i_π μ)`. The overall sign comes
/// from pairing `i_{X∧Y} = i_Y ∘ i_X` with `[π,π](df,dg,dh) = 2·Jacobiator`.
pub fn schouten_volume(fr: &PointFrame) -> f64 {
    let n = fr.dim();
    let pi = fr.pi_multivector();
    let lhs = interior_volume(fr, &jacobi_trivector(fr));
    let mut rhs = pi.interior(&interior_volume(fr, &pi).d()).scale(Jet2::constant(n, 2.0));
    if n >= 4 {
        rhs = rhs.sub(&interior_volume(fr, &wedge_power(fr, 2).unwrap()).d());
    }
    lhs.sub(&rhs).sup_norm()
}

/// `i_{[X,π]} μ = i_X d i_π μ + d i_X i_π μ − (div X) i_π μ`.
pub fn lie_volume(fr: &PointFrame, x: &[Jet2]) -> f64 {
    let xm = Multivector::from_components(x);
    let pi = fr.pi_multivector();
    let ipm = interior_volume(fr, &pi);
    let lhs = interior_volume(fr, &lie_derivative_bivector(fr, x));
    let mut rhs = xm.interior(&ipm.d());
    if ipm.degree() >= 1 {
        rhs = rhs.add(&xm.interior(&ipm).d());
    }
    rhs = rhs.sub(&ipm.scale(divergence_vector(fr, x)));
    lhs.sub(&rhs).sup_norm()
}

pub const FD_STEP: f64 = 1e-5;

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

/// Largest relative mismatch between the jet of `e` at `p` and central
/// differences: of the value for the gradient, of the jet gradient for the
/// Hessian.
pub fn fd_mismatch(e: &ScalarExpr, p: &[f64]) -> f64 {
    let j = eval_jet2(e, p).unwrap();
    let n = p.len();
    let mut worst = 0.0f64;
    let scale_g = j.grad().iter().fold(j.value().abs(), |a, g| a.max(g.abs())).max(1.0);
    for i in 0..n {
        let fp = eval_value(e, &shifted(p, i, FD_STEP)).unwrap();
        let fm = eval_value(e, &shifted(p, i, -FD_STEP)).unwrap();
        let fd = (fp - fm) / (2.0 * FD_STEP);
        worst = worst.max((fd - j.grad()[i]).abs() / scale_g);
        let gp = eval_jet2(e, &shifted(p, i, FD_STEP)).unwrap();
        let gm = eval_jet2(e, &shifted(p, i, -FD_STEP)).unwrap();
        for k in 0..n {
            let fd = (gp.grad()[k] - gm.grad()[k]) / (2.0 * FD_STEP);
            let scale_h = (0..n).fold(scale_g, |a, l| a.max(j.hess(k, l).abs()));
            worst = worst.max((fd - j.hess(i, k)).abs() / scale_h);
        }
    }
    worst
}
