//! Grid-level verdicts: each check evaluates pointwise residuals over a
//! [`SampleGrid`] and folds them into a [`CheckReport`].

mod grid;
mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use grid::{
    Exclusion, SampleGrid, DEFAULT_EXCLUSION_RADIUS, DEFAULT_HALF_WIDTH, DEFAULT_POINTS_PER_AXIS,
};
pub use report::{pointwise, CheckReport, Component, PointResidual};

use crate::contraconn::{
    d_pi_residual, f_connection_residual, kernel_split, metric_compat_residual, torsion_residual,
    DEFAULT_RANK_TOL,
};
use crate::expr::{Jet2, ScalarExpr};
use crate::fields::{
    anchor, differential, directional, divergence, divergence_vector, gradient, inner_covectors,
    interior_volume, jacobi_trivector, lie_derivative_bivector, lie_derivative_metric, raise, sup,
    vector_bracket, wedge_power, ChartModel, Form, Multivector, PointFrame,
};

/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `‖[π,π]‖` — the Jacobi identity.
pub fn check_jacobi(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    pointwise("jacobi", model, &grid.points(), tol, |fr| {
        Ok(vec![Component::decisive("schouten", jacobi_trivector(fr).sup_norm())])
    })
}

fn unimodular_components(fr: &PointFrame) -> Vec<Component> {
    let pi = fr.pi_multivector();
    let div = divergence(fr, &pi).sup_norm();
    let d_int = interior_volume(fr, &pi).d().sup_norm();
    vec![Component::decisive("div_pi", div), Component::decisive("d_i_pi_mu", d_int)]
}

/// `‖div π‖` and `‖d(i_π μ)‖`; both must vanish.
pub fn check_unimodular(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    pointwise("unimodular", model, &grid.points(), tol, |fr| Ok(unimodular_components(fr)))
}

/// `max |π_#(α)·π(β,γ) − π(D_αβ,γ) − π(β,D_αγ)|`, i.e. `Dπ = 0`.
pub fn check_d_pi(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    pointwise("dpi", model, &grid.points(), tol, |fr| {
        Ok(vec![Component::decisive("d_pi", d_pi_residual(fr))])
    })
}

/// Torsion and metric compatibility of `D` on coordinate covectors and the
/// declared 1-forms.
pub fn check_connection(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    pointwise("connection", model, &grid.points(), tol, |fr| {
        let mut fields: Vec<Vec<Jet2>> = (0..fr.dim()).map(|k| fr.basis_covector(k)).collect();
        for name in model.oneforms().keys() {
            fields.push(fr.oneform(name).map_err(err)?);
        }
        let (mut torsion, mut compat) = (0.0f64, 0.0f64);
        for a in &fields {
            for b in &fields {
                torsion = torsion.max(torsion_residual(fr, a, b));
                for c in &fields {
                    compat = compat.max(metric_compat_residual(fr, a, b, c));
                }
            }
        }
        Ok(vec![Component::decisive("torsion", torsion), Component::decisive("metric", compat)])
    })
}

/// Ranks of `π` over the sample and the modal rank among unambiguous points.
#[derive(Debug, Clone)]
pub struct RankProfile {
    pub modal: Option<usize>,
    pub counts: BTreeMap<usize, usize>,
    pub ambiguous: Vec<Vec<f64>>,
}

pub fn rank_profile(model: &ChartModel, points: &[Vec<f64>], rank_tol: f64) -> RankProfile {
    let ranks: Vec<Option<Result<usize, ()>>> = points
        .par_iter()
        .map(|p| {
            let fr = PointFrame::new(model, p).ok()?;
            Some(kernel_split(&fr, rank_tol).map(|s| s.rank).map_err(|_| ()))
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut ambiguous = Vec::new();
    for (p, r) in points.iter().zip(ranks) {
        match r {
            Some(Ok(r)) => *counts.entry(r).or_insert(0) += 1,
            Some(Err(())) => ambiguous.push(p.clone()),
            None => {}
        }
    }
    // ties resolve to the larger rank
    let modal = counts
        .iter()
        .max_by_key(|(r, c)| (**c, **r))
        .map(|(r, _)| *r);
    RankProfile {
        modal,
        counts,
        ambiguous,
    }
}

fn rank_notes(profile: &RankProfile, notes: &mut Vec<String>) {
    let parts: Vec<String> = profile
        .counts
        .iter()
        .map(|(r, c)| format!("rank {r}: {c} point(s)"))
        .collect();
    notes.push(format!("rank profile: {}", parts.join(", ")));
    if let Some(m) = profile.modal {
        let off: usize = profile.counts.iter().filter(|(r, _)| **r != m).map(|(_, c)| c).sum();
        if off > 0 {
            notes.push(format!(
                "{off} point(s) off the modal rank {m} treated as singular and excluded from the F^reg residual"
            ));
        }
    }
    for p in &profile.ambiguous {
        notes.push(format!("warning: ambiguous rank at {p:?}; excluded from the F^reg residual"));
    }
}

/// F^reg residual on a regular point, `None` when the point is not regular.
fn freg_at(fr: &PointFrame, modal: Option<usize>, rank_tol: f64) -> Option<f64> {
    let split = kernel_split(fr, rank_tol).ok()?;
    if Some(split.rank) != modal {
        return None;
    }
    f_connection_residual(fr, rank_tol).ok()
}

/// `max ‖D_α dx^k‖` over kernel covectors `α` at regular points.
pub fn check_freg(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    check_freg_with(model, grid, tol, DEFAULT_RANK_TOL)
}

pub fn check_freg_with(model: &ChartModel, grid: &SampleGrid, tol: f64, rank_tol: f64) -> CheckReport {
    let points = grid.points();
    let profile = rank_profile(model, &points, rank_tol);
    let modal = profile.modal;
    let mut r = pointwise("freg", model, &points, tol, |fr| {
        Ok(freg_at(fr, modal, rank_tol)
            .map(|v| vec![Component::decisive("freg", v)])
            .unwrap_or_default())
    });
    rank_notes(&profile, &mut r.notes);
    r
}

/// Killing-Poisson via the Jacobi identity, vanishing divergence and the
/// F^reg property of `D` on the regular points.
pub fn check_killing_poisson(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    check_killing_poisson_with(model, grid, tol, DEFAULT_RANK_TOL)
}

pub fn check_killing_poisson_with(
    model: &ChartModel,
    grid: &SampleGrid,
    tol: f64,
    rank_tol: f64,
) -> CheckReport {
    let points = grid.points();
    let profile = rank_profile(model, &points, rank_tol);
    let modal = profile.modal;
    let mut r = pointwise("killing-poisson", model, &points, tol, |fr| {
        let mut c = vec![Component::decisive("jacobi", jacobi_trivector(fr).sup_norm())];
        c.extend(unimodular_components(fr));
        if let Some(v) = freg_at(fr, modal, rank_tol) {
            c.push(Component::decisive("freg", v));
        }
        Ok(c)
    });
    if r.component("jacobi").is_some_and(|j| j > tol) {
        r.notes.push(
            "conditional: π fails the Jacobi identity, so the remaining residuals are not meaningful verdicts".into(),
        );
    }
    rank_notes(&profile, &mut r.notes);
    r
}

/// `‖π_#(df)‖` (f is a Casimir) and `‖L_{∇f} π‖`.
pub fn check_casimir(model: &ChartModel, grid: &SampleGrid, tol: f64, f: &str) -> CheckReport {
    let name = format!("casimir:{f}");
    if let Err(e) = model.scalar(f) {
        return CheckReport::failed(name, tol, e.to_string());
    }
    pointwise(&name, model, &grid.points(), tol, |fr| {
        let fj = fr.scalar(f).map_err(err)?;
        let cas = sup(&anchor(fr, &differential(&fj)));
        let lie = lie_derivative_bivector(fr, &gradient(fr, &fj)).sup_norm();
        Ok(vec![Component::decisive("casimir", cas), Component::decisive("gradient_lie_pi", lie)])
    })
}

fn require_dim3(name: &str, model: &ChartModel, tol: f64) -> Option<CheckReport> {
    (model.dim() != 3).then(|| {
        CheckReport::failed(name, tol, format!("needs a 3-dimensional chart, got {}", model.dim()))
    })
}

/// For `α = i_π μ`: `‖dα‖` and `‖d⟨α,α⟩ + δ(α) α‖` with `δ(α) = −div(#α)`.
pub fn check_kp_3d(model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
    if let Some(r) = require_dim3("kp3d", model, tol) {
        return r;
    }
    pointwise("kp3d", model, &grid.points(), tol, |fr| {
        let alpha = interior_volume(fr, &fr.pi_multivector()).as_components();
        let closed = Form::from_components(&alpha).d().sup_norm();
        let norm2 = differential(&inner_covectors(fr, &alpha, &alpha));
        let delta = -divergence_vector(fr, &raise(fr, &alpha));
        let eq: Vec<Jet2> = (0..3).map(|i| norm2[i] + delta * alpha[i]).collect();
        Ok(vec![Component::decisive("d_alpha", closed), Component::decisive("eikonal", sup(&eq))])
    })
}

/// `‖d⟨df,df⟩ + Δ(f) df‖` with `Δ = −div ∘ grad`.
pub fn check_equation_e(model: &ChartModel, f: &ScalarExpr, grid: &SampleGrid, tol: f64) -> CheckReport {
    if let Some(r) = require_dim3("equation-e", model, tol) {
        return r;
    }
    pointwise("equation-e", model, &grid.points(), tol, |fr| {
        let fj = fr.eval(f).map_err(err)?;
        let df = differential(&fj);
        let norm2 = differential(&inner_covectors(fr, &df, &df));
        let lap = -divergence_vector(fr, &gradient(fr, &fj));
        let eq: Vec<Jet2> = (0..3).map(|i| norm2[i] + lap * df[i]).collect();
        Ok(vec![Component::decisive("equation_e", sup(&eq))])
    })
}

/// `‖L_X g‖` decides; `|div X|` and `‖[X, ∇f]‖` for declared scalars with
/// `X(f) = 0` to first order at the point are reported alongside.
pub fn check_killing_vector(model: &ChartModel, grid: &SampleGrid, tol: f64, x: &str) -> CheckReport {
    let name = format!("killing:{x}");
    if let Err(e) = model.vector(x) {
        return CheckReport::failed(name, tol, e.to_string());
    }
    let mut r = pointwise(&name, model, &grid.points(), tol, |fr| {
        let xj = fr.vector(x).map_err(err)?;
        let mut c = vec![
            Component::decisive("lie_g", sup(&lie_derivative_metric(fr, &xj))),
            Component::info("div", divergence_vector(fr, &xj).value()),
        ];
        for f in model.scalars().keys() {
            let fj = fr.scalar(f).map_err(err)?;
            let xf = directional(&xj, &fj);
            let invariant = xf.value().abs() <= tol && xf.grad().iter().all(|g| g.abs() <= tol);
            if invariant {
                let b = vector_bracket(&xj, &gradient(fr, &fj));
                c.push(Component::info(format!("bracket_grad:{f}"), sup(&b)));
            }
        }
        Ok(c)
    });
    r.notes.push(
        "verdict from L_X g; div X and [X, ∇f] for sampled invariants are corroboration only".into(),
    );
    r
}

/// `‖[X, π] − π‖`.
pub fn check_liouville(model: &ChartModel, grid: &SampleGrid, tol: f64, x: &str) -> CheckReport {
    let name = format!("liouville:{x}");
    if let Err(e) = model.vector(x) {
        return CheckReport::failed(name, tol, e.to_string());
    }
    pointwise(&name, model, &grid.points(), tol, |fr| {
        let xj = fr.vector(x).map_err(err)?;
        let res = lie_derivative_bivector(fr, &xj).sub(&fr.pi_multivector());
        Ok(vec![Component::decisive("liouville", res.sup_norm())])
    })
}

/// For a Liouville field `X`: `[X, H_f] = H_f + H_{X(f)}` on coordinate
/// functions, and `L_X Ω = d i_X Ω = (n + div X) Ω` for `Ω = i_{∧ⁿπ} μ`.
pub fn check_liouville_identities(
    model: &ChartModel,
    grid: &SampleGrid,
    tol: f64,
    x: &str,
    n: usize,
) -> CheckReport {
    let name = format!("liouville-identities:{x}:{n}");
    if n == 0 || 2 * n > model.dim() {
        return CheckReport::skipped(name, tol, format!("needs 1 ≤ 2·{n} ≤ {}", model.dim()));
    }
    let pre = check_liouville(model, grid, tol, x);
    if !pre.pass {
        let mut r = CheckReport::skipped(name, tol, format!("{x} is not a Liouville field within tolerance"));
        r.errors.extend(pre.errors);
        return r;
    }
    let mut r = pointwise(&name, model, &grid.points(), tol, |fr| {
        let dim = fr.dim();
        let xj = fr.vector(x).map_err(err)?;
        let mut five = 0.0f64;
        for i in 0..dim {
            let f = Jet2::variable(dim, i, fr.point()[i]);
            let hf = anchor(fr, &differential(&f));
            let lhs = vector_bracket(&xj, &hf);
            let hxf = anchor(fr, &differential(&directional(&xj, &f)));
            let res: Vec<Jet2> = (0..dim).map(|k| lhs[k] - hf[k] - hxf[k]).collect();
            five = five.max(sup(&res));
        }
        let omega = interior_volume(fr, &wedge_power(fr, n).map_err(err)?);
        let lie = omega.lie_derivative(&xj);
        let d_ix = if omega.degree() == 0 {
            Form::zero(dim, 0)
        } else {
            Multivector::from_components(&xj).interior(&omega).d()
        };
        let factor = divergence_vector(fr, &xj) + Jet2::constant(dim, n as f64);
        let first = lie.sub(&d_ix).sup_norm();
        let second = d_ix.sub(&omega.scale(factor)).sup_norm();
        Ok(vec![
            Component::decisive("hamiltonian_bracket", five),
            Component::decisive("lie_equals_d_interior", first),
            Component::decisive("d_interior_equals_factor", second),
        ])
    });
    if !check_unimodular(model, grid, tol).pass {
        r.notes.push("π is not unimodular, so the Riemannian volume is not invariant".into());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3(scale: &str) -> ChartModel {
        let mut m = ChartModel::new(&["x", "y", "z"]).unwrap();
        m.set_pi_str(0, 1, &format!("{scale}*z")).unwrap();
        m.set_pi_str(0, 2, &format!("-{scale}*y")).unwrap();
        m.set_pi_str(1, 2, &format!("{scale}*x")).unwrap();
        m
    }

    fn r2(pi: &str) -> ChartModel {
        let mut m = ChartModel::new(&["x", "y"]).unwrap();
        m.set_pi_str(0, 1, pi).unwrap();
        m
    }

    fn ball_grid() -> SampleGrid {
        SampleGrid::default_for(3).excluding(vec![0.0; 3])
    }

    #[test]
    fn jacobi_examples() {
        let g = SampleGrid::default_for(3);
        let r = check_jacobi(&so3("1"), &g, DEFAULT_TOL);
        assert!(r.pass && r.max_residual <= 1e-12);
        let mut np = ChartModel::new(&["x", "y", "z"]).unwrap();
        np.set_pi_str(0, 1, "z").unwrap();
        np.set_pi_str(0, 2, "x").unwrap();
        let r = check_jacobi(&np, &g, DEFAULT_TOL);
        assert!(!r.pass);
        assert_eq!(r.max_residual, 4.0);
        assert!(check_jacobi(&r2("1"), &SampleGrid::default_for(2), DEFAULT_TOL).pass);
    }

    #[test]
    fn unimodular_examples() {
        let g2 = SampleGrid::default_for(2);
        assert!(check_unimodular(&r2("1"), &g2, DEFAULT_TOL).pass);
        assert!(check_unimodular(&so3("1"), &SampleGrid::default_for(3), DEFAULT_TOL).pass);
        let r = check_unimodular(&r2("x"), &g2, DEFAULT_TOL);
        assert!(!r.pass);
        assert_eq!(r.component("div_pi"), Some(1.0));
        assert_eq!(r.component("d_i_pi_mu"), Some(1.0));
    }

    #[test]
    fn casimir_examples() {
        let g = ball_grid();
        let mut m = so3("sqrt(x^2+y^2+z^2)");
        m.add_scalar("f", "x^2+y^2+z^2").unwrap();
        assert!(check_casimir(&m, &g, DEFAULT_TOL, "f").pass);
        let mut p = so3("1");
        p.add_scalar("f", "x^2+y^2+z^2").unwrap();
        let r = check_casimir(&p, &g, DEFAULT_TOL, "f");
        assert!(!r.pass);
        assert!(r.component("casimir").unwrap() < 1e-12);
        assert!(r.component("gradient_lie_pi").unwrap() > 0.1);
        let mut s = r2("1");
        s.add_scalar("c", "3").unwrap();
        assert!(check_casimir(&s, &SampleGrid::default_for(2), DEFAULT_TOL, "c").pass);
        assert!(!check_casimir(&s, &SampleGrid::default_for(2), DEFAULT_TOL, "missing").pass);
    }

    #[test]
    fn killing_poisson_examples() {
        let g = ball_grid();
        let r = check_killing_poisson(&so3("sqrt(x^2+y^2+z^2)"), &g, DEFAULT_TOL);
        assert!(r.pass, "{r:?}");
        let r = check_killing_poisson(&so3("1"), &g, DEFAULT_TOL);
        assert!(!r.pass);
        assert!(r.component("freg").unwrap() > 1e-3);
    }

    #[test]
    fn kp3d_examples() {
        let g = ball_grid().with_points(vec![vec![1.0, 0.0, 0.0]]);
        assert!(check_kp_3d(&so3("sqrt(x^2+y^2+z^2)"), &g, DEFAULT_TOL).pass);
        let r = check_kp_3d(&so3("1"), &g, DEFAULT_TOL);
        assert!(!r.pass);
        assert!((r.residual_at(&[1.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let z = ChartModel::new(&["x", "y", "z"]).unwrap();
        assert!(check_kp_3d(&z, &g, DEFAULT_TOL).pass);
        assert!(!check_kp_3d(&r2("1"), &SampleGrid::default_for(2), DEFAULT_TOL).pass);
    }

    #[test]
    fn equation_e_examples() {
        let m = ChartModel::new(&["x", "y", "z"]).unwrap();
        let g = SampleGrid::default_for(3);
        let f = m.parse("2*x^2+2*y^2+2*z^2-2*x*y+2*x*z+2*y*z").unwrap();
        let r = check_equation_e(&m, &f, &g, 1e-10);
        assert!(r.pass, "{}", r.max_residual);
        let f = m.parse("(x^2+y^2+z^2)^(3/2)").unwrap();
        assert!(check_equation_e(&m, &f, &ball_grid(), 1e-8).pass);
        let f = m.parse("(x^2+y^2+z^2)/2").unwrap();
        let g1 = SampleGrid::cube(3, 0).with_points(vec![vec![1.0, 0.0, 0.0]]);
        let r = check_equation_e(&m, &f, &g1, DEFAULT_TOL);
        assert_eq!(r.max_residual, 1.0);
    }

    #[test]
    fn killing_vector_examples() {
        let mut m = ChartModel::new(&["x", "y"]).unwrap();
        m.add_vector("R", &["-y", "x"]).unwrap();
        m.add_vector("D", &["x", "0"]).unwrap();
        m.add_scalar("r2", "x^2+y^2").unwrap();
        let g = SampleGrid::default_for(2);
        let r = check_killing_vector(&m, &g, DEFAULT_TOL, "R");
        assert!(r.pass);
        assert_eq!(r.informational["div"], 0.0);
        assert_eq!(r.informational["bracket_grad:r2"], 0.0);
        let r = check_killing_vector(&m, &g, DEFAULT_TOL, "D");
        assert!(!r.pass);
        assert_eq!(r.max_residual, 2.0);
    }

    #[test]
    fn liouville_examples() {
        let mut m = r2("1");
        m.add_vector("X", &["-x", "0"]).unwrap();
        m.add_vector("Z", &["0", "0"]).unwrap();
        let g = SampleGrid::default_for(2);
        assert!(check_liouville(&m, &g, 1e-12, "X").pass);
        let r = check_liouville(&m, &g, 1e-12, "Z");
        assert_eq!(r.max_residual, 1.0);
        let r = check_liouville_identities(&m, &g, 1e-10, "X", 1);
        assert!(r.pass, "{r:?}");
        assert!(check_liouville_identities(&m, &g, 1e-10, "X", 2).skipped);
        assert!(check_liouville_identities(&m, &g, 1e-10, "Z", 1).skipped);

        let mut z = ChartModel::new(&["x", "y"]).unwrap();
        z.add_vector("X", &["x*y", "sin(x)"]).unwrap();
        assert!(check_liouville_identities(&z, &g, 1e-10, "X", 1).pass);
    }

    #[test]
    fn freg_reports_rank_profile() {
        let mut m = so3("1");
        m.set_metric_str(0, 0, "1").unwrap();
        let r = check_freg(&m, &SampleGrid::default_for(3), DEFAULT_TOL);
        assert!(r.notes.iter().any(|n| n.contains("rank 0: 1 point")));
        assert!(r.notes.iter().any(|n| n.contains("rank 2: 124 point")));
    }

    #[test]
    fn connection_check_on_curved_metric() {
        let mut m = so3("sqrt(x^2+y^2+z^2)");
        m.set_metric_str(0, 0, "1 + y^2").unwrap();
        m.set_metric_str(0, 2, "-y").unwrap();
        m.add_oneform("a", &["x*y", "z^2", "exp(x/3)"]).unwrap();
        let g = SampleGrid::cube(3, 3).excluding(vec![0.0; 3]);
        let r = check_connection(&m, &g, 1e-9);
        assert!(r.pass, "{:?}", r.components);
    }
}
