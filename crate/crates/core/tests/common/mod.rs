//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

pub mod residuals;

use pkt::expr::Jet2;
use pkt::fields::{ChartModel, PointFrame};
use rand::rngs::StdRng;
use rand::Rng;

pub const XYZW: [&str; 4] = ["x", "y", "z", "w"];

fn coef(rng: &mut StdRng) -> String {
    format!("{:.3}", rng.gen_range(-1.5..1.5))
}

/// A random smooth expression over the first `dim` coordinates, built so
/// that it is defined everywhere (guarded logs, roots and quotients).
pub fn random_expr(rng: &mut StdRng, dim: usize, depth: u32) -> String {
    let var = |rng: &mut StdRng| XYZW[rng.gen_range(0..dim)].to_string();
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) { var(rng) } else { coef(rng) };
    }
    let a = random_expr(rng, dim, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("({a} + {})", random_expr(rng, dim, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, dim, depth - 1)),
        2 | 3 => format!("({a} * {})", random_expr(rng, dim, depth - 1)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(0.3*{a})"),
        7 => format!("sqrt(1 + ({a})^2)"),
        8 => format!("log(2 + ({a})^2)"),
        9 => format!("({a}) / (1.5 + ({})^2)", random_expr(rng, dim, depth - 1)),
        _ => format!("({a})^{}", rng.gen_range(2..4)),
    }
}

/// A random polynomial of degree ≤ 2 with coefficients in [−1, 1].
pub fn random_quadratic(rng: &mut StdRng, dim: usize) -> String {
    let mut terms = vec![coef(rng)];
    for i in 0..dim {
        terms.push(format!("{}*{}", coef(rng), XYZW[i]));
        for j in i..dim {
            terms.push(format!("{}*{}*{}", coef(rng), XYZW[i], XYZW[j]));
        }
    }
    terms.join(" + ")
}

/// A random positive-definite metric (unit diagonal plus a bounded bump,
/// small off-diagonal terms) and a random bivector.
pub fn random_model(rng: &mut StdRng, dim: usize, curved: bool) -> ChartModel {
    let mut m = ChartModel::new(&XYZW[..dim]).unwrap();
    if curved {
        for i in 0..dim {
            let e = random_expr(rng, dim, 2);
            m.set_metric_str(i, i, &format!("1 + 0.5*sin({e})^2")).unwrap();
            for j in i + 1..dim {
                let e = random_expr(rng, dim, 2);
                m.set_metric_str(i, j, &format!("0.15*cos({e})")).unwrap();
            }
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let e = if rng.gen_bool(0.5) {
                random_quadratic(rng, dim)
            } else {
                random_expr(rng, dim, 3)
            };
            m.set_pi_str(i, j, &e).unwrap();
        }
    }
    m
}

pub fn random_point(rng: &mut StdRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

/// Sup-norm of the difference of two value vectors.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn random_field(rng: &mut StdRng, model: &ChartModel, fr: &PointFrame) -> Vec<Jet2> {
    (0..model.dim()).map(|_| random_scalar(rng, model, fr)).collect()
}

pub fn random_scalar(rng: &mut StdRng, model: &ChartModel, fr: &PointFrame) -> Jet2 {
    let e = model.parse(&random_expr(rng, model.dim(), 3)).unwrap();
    fr.eval(&e).unwrap()
}

/// A 1-form field with components of moderate size on the default box:
/// a quadratic plus bounded trigonometric and exponential terms.
pub fn random_oneform(rng: &mut StdRng, model: &ChartModel, fr: &PointFrame) -> Vec<Jet2> {
    let dim = model.dim();
    let linear = |rng: &mut StdRng| {
        let terms: Vec<String> = (0..dim).map(|i| format!("{}*{}", coef(rng), XYZW[i])).collect();
        terms.join(" + ")
    };
    (0..dim)
        .map(|_| {
            let src = format!(
                "{} + {}*sin({}) + {}*exp(0.2*({}))",
                random_quadratic(rng, dim),
                coef(rng),
                linear(rng),
                coef(rng),
                linear(rng)
            );
            fr.eval(&model.parse(&src).unwrap()).unwrap()
        })
        .collect()
}
