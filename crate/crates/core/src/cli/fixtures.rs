//! Built-in chart and Lie algebra fixtures.

use std::collections::BTreeMap;

use crate::checks::{Exclusion, DEFAULT_EXCLUSION_RADIUS};

use super::spec::{ActionSpec, GridSpec, LieSpec, ManifoldSpec};

/// Chart fixtures, in listing order.
pub const CHART_FIXTURES: [&str; 8] = [
    "constant-symplectic-r2",
    "quadratic-family",
    "radial-r32",
    "sqrt-so3",
    "so3-plain",
    "nonpoisson",
    "heisenberg-kp",
    "liouville-r2",
];

/// Chart fixtures expected to fail their checks.
pub const NEGATIVE_FIXTURES: [&str; 2] = ["so3-plain", "nonpoisson"];

/// Lie algebra fixtures for `pkt lie`.
pub const LIE_FIXTURES: [&str; 3] = ["heisenberg", "aff1", "abelian"];

fn map<const N: usize>(entries: [(&str, &str); N]) -> BTreeMap<String, String> {
    entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn origin_excluded() -> GridSpec {
    GridSpec {
        exclusions: vec![Exclusion {
            center: vec![0.0; 3],
            radius: DEFAULT_EXCLUSION_RADIUS,
        }],
        ..Default::default()
    }
}

fn xyz() -> Vec<String> {
    strings(&["x", "y", "z"])
}

/// The bivector `f_z ∂x∧∂y − f_y ∂x∧∂z + f_x ∂y∧∂z` from the partials of `f`.
fn dictionary(fx: &str, fy: &str, fz: &str) -> BTreeMap<String, String> {
    map([("x,y", fz), ("x,z", &format!("-({fy})")), ("y,z", fx)])
}

const THREE_D_CHECKS: [&str; 6] = ["jacobi", "unimodular", "freg", "dpi", "kp3d", "killing-poisson"];

/// `f = (a+c)x² + (a+b)y² + (b+c)z² − 2√(bc)xy + 2√(ab)xz + 2√(ac)yz` and
/// its bivector.
pub fn quadratic_family(a: f64, b: f64, c: f64) -> ManifoldSpec {
    let (ac, ab, bc) = (a + c, a + b, b + c);
    let (sbc, sab, sac) = (
        format!("sqrt({})", b * c),
        format!("sqrt({})", a * b),
        format!("sqrt({})", a * c),
    );
    let f = format!("({ac})*x^2 + ({ab})*y^2 + ({bc})*z^2 - 2*{sbc}*x*y + 2*{sab}*x*z + 2*{sac}*y*z");
    let fx = format!("2*({ac})*x - 2*{sbc}*y + 2*{sab}*z");
    let fy = format!("2*({ab})*y - 2*{sbc}*x + 2*{sac}*z");
    let fz = format!("2*({bc})*z + 2*{sab}*x + 2*{sac}*y");
    let mut checks = strings(&THREE_D_CHECKS);
    checks.extend(strings(&["equation-e:f", "casimir:f", "connection"]));
    ManifoldSpec {
        name: Some("quadratic-family".into()),
        coords: xyz(),
        pi: dictionary(&fx, &fy, &fz),
        scalars: map([("f", f.as_str())]),
        tolerance: Some(1e-8),
        checks,
        ..Default::default()
    }
}

const SO3_R: &str = "sqrt(x^2+y^2+z^2)";

fn so3_pi(scale: &str) -> BTreeMap<String, String> {
    let s = |e: &str| if scale.is_empty() { e.to_string() } else { format!("{scale}*{e}") };
    let mut m = BTreeMap::new();
    m.insert("x,y".into(), s("z"));
    m.insert("x,z".into(), if scale.is_empty() { "-y".into() } else { format!("-{scale}*y") });
    m.insert("y,z".into(), s("x"));
    m
}

/// The chart fixture named `name`; `params` applies to `quadratic-family`.
pub fn chart_fixture(name: &str, params: Option<(f64, f64, f64)>) -> Option<ManifoldSpec> {
    let spec = match name {
        "constant-symplectic-r2" => ManifoldSpec {
            name: Some(name.into()),
            coords: strings(&["x", "y"]),
            pi: map([("x,y", "1")]),
            tolerance: Some(1e-8),
            checks: strings(&["jacobi", "unimodular", "freg", "dpi", "connection", "killing-poisson"]),
            ..Default::default()
        },
        "quadratic-family" => {
            let (a, b, c) = params.unwrap_or((1.0, 1.0, 1.0));
            quadratic_family(a, b, c)
        }
        "radial-r32" => {
            let mut checks = strings(&THREE_D_CHECKS);
            checks.extend(strings(&["equation-e:f", "casimir:f"]));
            ManifoldSpec {
                name: Some(name.into()),
                coords: xyz(),
                pi: so3_pi(&format!("3*{SO3_R}")),
                scalars: map([("f", "(x^2+y^2+z^2)^(3/2)")]),
                grid: Some(origin_excluded()),
                tolerance: Some(1e-8),
                checks,
                ..Default::default()
            }
        }
        "sqrt-so3" => {
            let mut checks = strings(&THREE_D_CHECKS);
            checks.extend(strings(&["casimir:r2", "connection"]));
            ManifoldSpec {
                name: Some(name.into()),
                coords: xyz(),
                pi: so3_pi(SO3_R),
                scalars: map([("r2", "x^2+y^2+z^2")]),
                grid: Some(origin_excluded()),
                tolerance: Some(1e-8),
                checks,
                ..Default::default()
            }
        }
        "so3-plain" => ManifoldSpec {
            name: Some(name.into()),
            coords: xyz(),
            pi: so3_pi(""),
            grid: Some(origin_excluded()),
            tolerance: Some(1e-8),
            checks: strings(&["jacobi", "unimodular", "freg", "dpi", "kp3d"]),
            ..Default::default()
        },
        "nonpoisson" => ManifoldSpec {
            name: Some(name.into()),
            coords: xyz(),
            pi: map([("x,y", "z"), ("x,z", "x")]),
            tolerance: Some(1e-8),
            checks: strings(&["jacobi"]),
            ..Default::default()
        },
        "heisenberg-kp" => {
            let mut vectors = BTreeMap::new();
            vectors.insert("e1".into(), strings(&["1", "0", "0"]));
            vectors.insert("e2".into(), strings(&["0", "1", "x"]));
            vectors.insert("e3".into(), strings(&["0", "0", "1"]));
            let mut checks = strings(&["killing:e1", "killing:e2", "killing:e3"]);
            checks.extend(strings(&THREE_D_CHECKS));
            checks.push("connection".into());
            ManifoldSpec {
                name: Some(name.into()),
                coords: xyz(),
                metric: map([("x,x", "1 + y^2"), ("x,z", "-y")]),
                pi: map([("x,z", "1")]),
                vectors,
                tolerance: Some(1e-8),
                checks,
                ..Default::default()
            }
        }
        "liouville-r2" => {
            let mut vectors = BTreeMap::new();
            vectors.insert("X".into(), strings(&["-x", "0"]));
            ManifoldSpec {
                name: Some(name.into()),
                coords: strings(&["x", "y"]),
                pi: map([("x,y", "1")]),
                vectors,
                tolerance: Some(1e-10),
                checks: strings(&["liouville:X", "liouville-identities:X:1", "jacobi", "unimodular"]),
                ..Default::default()
            }
        }
        _ => return None,
    };
    Some(spec)
}

fn heisenberg_action() -> ActionSpec {
    ActionSpec {
        coords: xyz(),
        metric: map([("x,x", "1 + y^2"), ("x,z", "-y")]),
        generators: vec![
            strings(&["1", "0", "0"]),
            strings(&["0", "1", "x"]),
            strings(&["0", "0", "1"]),
        ],
        grid: None,
    }
}

fn brackets(entries: &[(&str, &str, f64)]) -> BTreeMap<String, BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (ij, k, c) in entries {
        out.entry(ij.to_string()).or_default().insert(k.to_string(), *c);
    }
    out
}

pub fn lie_fixture(name: &str) -> Option<LieSpec> {
    let r = |k: &str| Some([(k.to_string(), 1.0)].into_iter().collect());
    let spec = match name {
        "heisenberg" => LieSpec {
            name: Some(name.into()),
            dim: 3,
            brackets: brackets(&[("1,2", "3", 1.0)]),
            r: r("1,3"),
            action: Some(heisenberg_action()),
            tolerance: Some(1e-10),
            checks: strings(&["killing-poisson"]),
        },
        "aff1" => LieSpec {
            name: Some(name.into()),
            dim: 2,
            brackets: brackets(&[("1,2", "2", 1.0)]),
            r: r("1,2"),
            action: None,
            tolerance: Some(1e-10),
            checks: Vec::new(),
        },
        "abelian" => LieSpec {
            name: Some(name.into()),
            dim: 2,
            brackets: BTreeMap::new(),
            r: r("1,2"),
            action: Some(ActionSpec {
                coords: strings(&["x", "y"]),
                metric: BTreeMap::new(),
                generators: vec![strings(&["1", "0"]), strings(&["0", "1"])],
                grid: None,
            }),
            tolerance: Some(1e-10),
            checks: strings(&["killing-poisson"]),
        },
        _ => return None,
    };
    Some(spec)
}
