//! Acceptance criteria. Runs as a plain program (no test harness) and
//! prints one pass/fail line per criterion; exits non-zero if any fails.

mod common;

use std::fs;
use std::process::Command;
use std::time::Instant;

use common::residuals::{
    fd_mismatch, hamiltonian_divergence, hamiltonian_volume, lie_volume, schouten_volume,
    volume_derivative_bivector, volume_derivative_vector,
};
use common::{random_expr, random_field, random_model, random_oneform, random_point, random_scalar, XYZW};
use pkt::checks::{
    check_d_pi, check_equation_e, check_killing_poisson, check_killing_vector, check_kp_3d, check_liouville,
    check_liouville_identities, SampleGrid,
};
use pkt::cli::fixtures::{chart_fixture, lie_fixture, quadratic_family, CHART_FIXTURES, NEGATIVE_FIXTURES};
use pkt::contraconn::{formula1_residual, koszul_bracket, metric_d};
use pkt::expr::{parse, Jet2};
use pkt::fields::{anchor, directional, inner_covectors, ChartModel, PointFrame};
use pkt::liealg::{action_homomorphism_residual, cybe_residual, induced_bivector, unimodularity_check};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn euclidean3() -> ChartModel {
    ChartModel::new(&["x", "y", "z"]).unwrap()
}

fn quadratic_family_solves_e() -> Outcome {
    let grid = SampleGrid::cube(3, 5);
    let mut worst = (0.0f64, 0.0f64);
    for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (4.0, 1.0, 9.0)] {
        let model = quadratic_family(a, b, c).to_model()?;
        let e = check_equation_e(&model, model.scalar("f").unwrap(), &grid, 1e-9);
        ensure(e.pass, format!("({a},{b},{c}): d|df|² + Δf·df residual {:e}", e.max_residual))?;
        let kp = check_killing_poisson(&model, &grid, 1e-9);
        ensure(kp.pass, format!("({a},{b},{c}): killing-poisson residual {:e}", kp.max_residual))?;
        worst = (worst.0.max(e.max_residual), worst.1.max(kp.max_residual));
    }
    Ok(format!("max d|df|² + Δf·df residual {:.1e}, max killing-poisson residual {:.1e}", worst.0, worst.1))
}

fn radial_family() -> Outcome {
    let m = euclidean3();
    let grid = SampleGrid::cube(3, 5).excluding(vec![0.0; 3]);
    let f = m.parse("(x^2+y^2+z^2)^(3/2)").unwrap();
    let good = check_equation_e(&m, &f, &grid, 1e-8);
    ensure(good.pass, format!("r^3: residual {:e}", good.max_residual))?;
    let at = vec![1.0, 0.0, 0.0];
    let half = m.parse("(x^2+y^2+z^2)/2").unwrap();
    let bad = check_equation_e(&m, &half, &grid.clone().with_points(vec![at.clone()]), 1e-8);
    let r = bad.residual_at(&at).ok_or("(1,0,0) not sampled")?;
    ensure(!bad.pass && (r - 1.0).abs() <= 1e-9, format!("r²/2: residual {r} at (1,0,0)"))?;
    Ok(format!("r^3 residual {:.1e}; r²/2 residual at (1,0,0) = {r}", good.max_residual))
}

fn sqrt_so3_routes() -> Outcome {
    let good = chart_fixture("sqrt-so3", None).unwrap();
    let grid = good.to_grid(None)?;
    let plain = chart_fixture("so3-plain", None).unwrap().to_model()?;
    let good = good.to_model()?;
    let routes = |m: &ChartModel| {
        [
            check_killing_poisson(m, &grid, 1e-7),
            check_d_pi(m, &grid, 1e-7),
            check_kp_3d(m, &grid, 1e-7),
        ]
    };
    let g = routes(&good);
    let p = routes(&plain);
    let gv: Vec<bool> = g.iter().map(|r| r.pass).collect();
    let pv: Vec<bool> = p.iter().map(|r| r.pass).collect();
    ensure(gv == [true; 3], format!("√r·π_so3 verdicts {gv:?}"))?;
    ensure(pv == [false; 3], format!("π_so3 verdicts {pv:?}"))?;
    let gmax = g.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let pmin = p.iter().map(|r| r.max_residual).fold(f64::INFINITY, f64::min);
    Ok(format!("√r·π_so3 max residual {gmax:.1e}; plain π_so3 smallest route residual {pmin:.2}; routes agree"))
}

/// All shipped chart fixtures plus the bivectors induced by the Lie fixtures.
fn shipped_models() -> Vec<(String, ChartModel, SampleGrid)> {
    let mut out = Vec::new();
    for name in CHART_FIXTURES {
        let spec = chart_fixture(name, None).unwrap();
        out.push((name.to_string(), spec.to_model().unwrap(), spec.to_grid(None).unwrap()));
    }
    for name in ["heisenberg", "abelian"] {
        let spec = lie_fixture(name).unwrap();
        let l = spec.to_model().unwrap().unwrap();
        let grid = spec.action_grid().unwrap().unwrap();
        out.push((format!("{name} (induced)"), induced_bivector(&l).unwrap(), grid));
    }
    out
}

/// A uniform random point of the grid box outside its exclusions.
fn random_grid_point(rng: &mut StdRng, grid: &SampleGrid) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..grid.dim()).map(|i| rng.gen_range(grid.lower[i]..=grid.upper[i])).collect();
        let excluded = grid.exclusions.iter().any(|e| {
            e.center.iter().zip(&p).map(|(c, x)| (c - x).powi(2)).sum::<f64>().sqrt() < e.radius
        });
        if !excluded {
            return p;
        }
    }
}

/// Torsion and metric-compatibility residuals over all pairs and triples
/// of `fields`, from one table of `D_αβ`.
fn axiom_residuals(fr: &PointFrame, fields: &[Vec<Jet2>]) -> (f64, f64) {
    let d: Vec<Vec<Vec<Jet2>>> =
        fields.iter().map(|a| fields.iter().map(|b| metric_d(fr, a, b)).collect()).collect();
    let (mut t, mut c) = (0.0f64, 0.0f64);
    for (i, a) in fields.iter().enumerate() {
        let pa = anchor(fr, a);
        for (j, b) in fields.iter().enumerate() {
            let k = koszul_bracket(fr, a, b);
            t = (0..fr.dim()).fold(t, |t, m| t.max((d[i][j][m] - d[j][i][m] - k[m]).value().abs()));
            for (l, g) in fields.iter().enumerate() {
                let lhs = directional(&pa, &inner_covectors(fr, b, g));
                let rhs = inner_covectors(fr, &d[i][j], g) + inner_covectors(fr, b, &d[i][l]);
                c = c.max((lhs - rhs).value().abs());
            }
        }
    }
    (t, c)
}

fn connection_axioms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(41);
    let mut worst = (0.0f64, 0.0f64);
    let models = shipped_models();
    for (name, model, grid) in &models {
        let samples: Vec<(Vec<f64>, u64)> =
            (0..100).map(|_| (random_grid_point(&mut rng, grid), rng.gen())).collect();
        let res: Vec<(f64, f64)> = samples
            .par_iter()
            .map(|(p, seed)| {
                let fr = PointFrame::new(model, p).unwrap();
                let mut local = StdRng::seed_from_u64(*seed);
                let mut fields: Vec<Vec<Jet2>> = (0..fr.dim()).map(|k| fr.basis_covector(k)).collect();
                fields.push(random_oneform(&mut local, model, &fr));
                fields.push(random_oneform(&mut local, model, &fr));
                axiom_residuals(&fr, &fields)
            })
            .collect();
        let (t, c) = res.iter().fold((0.0f64, 0.0f64), |a, r| (a.0.max(r.0), a.1.max(r.1)));
        ensure(t <= 1e-9 && c <= 1e-9, format!("{name}: torsion {t:e}, metric {c:e}"))?;
        worst = (worst.0.max(t), worst.1.max(c));
    }
    Ok(format!(
        "{} fixtures × 100 points: torsion {:.1e}, metric compatibility {:.1e}",
        models.len(),
        worst.0,
        worst.1
    ))
}

fn formula_one() -> Outcome {
    let mut rng = StdRng::seed_from_u64(42);
    let mut pool = shipped_models();
    for (k, dim) in [2, 3, 3, 4].into_iter().enumerate() {
        let m = random_model(&mut rng, dim, k % 2 == 1);
        pool.push((format!("random ℝ{dim} #{k}"), m, SampleGrid::cube(dim, 5)));
    }
    let mut worst = 0.0f64;
    for s in 0..50 {
        let (name, model, grid) = &pool[s % pool.len()];
        let p = random_grid_point(&mut rng, grid);
        let fr = PointFrame::new(model, &p).unwrap();
        let alpha = random_oneform(&mut rng, model, &fr);
        let beta: Vec<f64> = (0..fr.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gamma: Vec<f64> = (0..fr.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = formula1_residual(&fr, &alpha, &beta, &gamma);
        ensure(r <= 1e-8, format!("{name} at {p:?}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("50 samples, max residual {worst:.1e}"))
}

fn calculus_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(43);
    // d(i_X μ), d(i_π μ), div H_f, L_{H_f} μ, i_{[π,π]} μ, i_{[X,π]} μ
    let mut worst = [0.0f64; 6];
    for dim in [2, 3] {
        for curved in [false, true] {
            let model = random_model(&mut rng, dim, curved);
            for _ in 0..20 {
                let p = random_point(&mut rng, dim);
                let fr = PointFrame::new(&model, &p).unwrap();
                let x = random_field(&mut rng, &model, &fr);
                let f = random_scalar(&mut rng, &model, &fr);
                let r = [
                    volume_derivative_vector(&fr, &x),
                    volume_derivative_bivector(&fr),
                    hamiltonian_divergence(&fr, &f),
                    hamiltonian_volume(&fr, &f),
                    if dim == 3 { schouten_volume(&fr) } else { 0.0 },
                    lie_volume(&fr, &x),
                ];
                for (w, v) in worst.iter_mut().zip(r) {
                    *w = w.max(if v.is_nan() { f64::INFINITY } else { v });
                }
            }
        }
    }
    let labels = ["d(i_X μ)", "d(i_π μ)", "div H_f", "L_{H_f} μ", "i_{[π,π]} μ", "i_{[X,π]} μ"];
    let summary: Vec<String> = labels.iter().zip(worst).map(|(l, w)| format!("{l} {w:.1e}")).collect();
    ensure(worst.iter().all(|w| *w <= 1e-8), summary.join(", "))?;
    Ok(summary.join(", "))
}

fn liouville_suite() -> Outcome {
    let spec = chart_fixture("liouville-r2", None).unwrap();
    let (model, grid) = (spec.to_model()?, spec.to_grid(None)?);
    let l = check_liouville(&model, &grid, 1e-10, "X");
    ensure(l.pass, format!("[X,π] − π residual {:e}", l.max_residual))?;
    let ids = check_liouville_identities(&model, &grid, 1e-10, "X", 1);
    ensure(ids.pass, format!("identities: {:?} {:?}", ids.components, ids.notes))?;
    let c = |k: &str| ids.component(k).unwrap_or(f64::NAN);
    Ok(format!(
        "liouville {:.1e}; [X,H_f] = H_f + H_{{X(f)}} for f∈{{x,y}} {:.1e}; L_XΩ = d i_X Ω {:.1e}; = (1+div X)Ω {:.1e}",
        l.max_residual,
        c("hamiltonian_bracket"),
        c("lie_equals_d_interior"),
        c("d_interior_equals_factor")
    ))
}

fn lie_pipeline() -> Outcome {
    let spec = lie_fixture("heisenberg").unwrap();
    let l = spec.to_model()?.map_err(|e| e.to_string())?;
    let cybe = cybe_residual(&l).map_err(|e| e.to_string())?;
    ensure(cybe.iter().all(|v| *v == 0.0), format!("CYBE {cybe:?}"))?;
    let u = unimodularity_check(&l, 1e-10).map_err(|e| e.to_string())?;
    ensure(u.unimodular && u.traces.iter().all(|t| *t == 0.0), format!("traces {:?}", u.traces))?;
    let grid = spec.action_grid()?.unwrap();
    let hom = action_homomorphism_residual(&l, &grid, 1e-12).map_err(|e| e.to_string())?;
    ensure(hom.pass, format!("homomorphism residual {:e}", hom.max_residual))?;

    let action = l.action().unwrap();
    let mut chart = action.chart.clone();
    for (k, g) in action.generators.iter().enumerate() {
        chart.add_vector_exprs(&format!("e{}", k + 1), g.clone()).unwrap();
    }
    let mut killing = 0.0f64;
    for k in 1..=3 {
        let r = check_killing_vector(&chart, &grid, 1e-10, &format!("e{k}"));
        ensure(r.pass, format!("e{k} is not Killing: {:e}", r.max_residual))?;
        killing = killing.max(r.max_residual);
    }

    let induced = induced_bivector(&l).map_err(|e| e.to_string())?;
    for p in grid.points() {
        let fr = PointFrame::new(&induced, &p).unwrap();
        let pi = fr.pi_values();
        let expected = [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];
        for i in 0..3 {
            ensure(
                (0..3).all(|j| pi[(i, j)] == expected[i][j]),
                format!("induced π at {p:?} is not ∂x∧∂z"),
            )?;
        }
    }
    let kp = check_killing_poisson(&induced, &grid, 1e-10);
    ensure(kp.pass, format!("induced π: killing-poisson residual {:e}", kp.max_residual))?;

    let aff = lie_fixture("aff1").unwrap().to_model()?.map_err(|e| e.to_string())?;
    let ua = unimodularity_check(&aff, 1e-10).map_err(|e| e.to_string())?;
    ensure(!ua.unimodular && ua.traces.contains(&1.0), format!("aff(1) traces {:?}", ua.traces))?;
    Ok(format!(
        "CYBE 0, traces {:?}, homomorphism {:.1e}, Killing {:.1e}, induced ∂x∧∂z killing-poisson {:.1e}; aff(1) traces {:?}",
        u.traces, hom.max_residual, killing, kp.max_residual, ua.traces
    ))
}

fn autodiff_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(44);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let dim = 1 + k % 4;
        let coords: std::sync::Arc<[String]> = XYZW[..dim].iter().map(|s| s.to_string()).collect();
        let src = random_expr(&mut rng, dim, 4);
        let e = parse(&src, &coords).map_err(|e| format!("{src}: {e}"))?;
        let p = random_point(&mut rng, dim);
        let m = fd_mismatch(&e, &p);
        ensure(m <= 1e-6, format!("{src} at {p:?}: relative mismatch {m:e}"))?;
        worst = worst.max(m);
    }
    Ok(format!("100 expressions, max relative mismatch {worst:.1e}"))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pkt");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let run = |args: &[&str]| -> Result<i32, String> {
        let o = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        o.status.code().ok_or_else(|| "killed by signal".to_string())
    };
    let emit = |name: &str| -> Result<String, String> {
        let code = run(&["examples", "emit", name, d.to_str().unwrap()])?;
        ensure(code == 0, format!("emit {name} exited {code}"))?;
        Ok(d.join(format!("{name}.json")).to_string_lossy().into_owned())
    };
    let mut counts = (0, 0);
    for name in CHART_FIXTURES {
        let expected = if NEGATIVE_FIXTURES.contains(&name) { 1 } else { 0 };
        let code = run(&["check", &emit(name)?])?;
        ensure(code == expected, format!("{name} exited {code}, expected {expected}"))?;
        if expected == 0 { counts.0 += 1 } else { counts.1 += 1 }
    }
    for (name, expected) in [("heisenberg", 0), ("abelian", 0), ("aff1", 1)] {
        let code = run(&["lie", &emit(name)?])?;
        ensure(code == expected, format!("lie {name} exited {code}, expected {expected}"))?;
        if expected == 0 { counts.0 += 1 } else { counts.1 += 1 }
    }
    let bad = d.join("malformed.json");
    fs::write(&bad, r#"{"coords": ["x", "y"], "pi": {"x,y": "x +"}}"#).map_err(|e| e.to_string())?;
    let code = run(&["check", bad.to_str().unwrap()])?;
    ensure(code == 2, format!("malformed spec exited {code}"))?;

    let spec = emit("sqrt-so3")?;
    let (r1, r2) = (d.join("r1.json"), d.join("r2.json"));
    for r in [&r1, &r2] {
        run(&["check", &spec, "--report", r.to_str().unwrap()])?;
    }
    let (a, b) = (fs::read(&r1).map_err(|e| e.to_string())?, fs::read(&r2).map_err(|e| e.to_string())?);
    ensure(a == b, "report differs between runs")?;
    Ok(format!(
        "{} positive exit 0, {} negative exit 1, malformed exit 2, report stable ({} bytes)",
        counts.0,
        counts.1,
        a.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("quadratic family solves d|df|² + Δf·df = 0 and is Killing-Poisson", quadratic_family_solves_e),
        ("radial r^3 solves d|df|² + Δf·df = 0, r²/2 fails with residual 1", radial_family),
        ("√r·π_so3 passes all three routes, plain π_so3 fails all three", sqrt_so3_routes),
        ("connection is torsion-free and metric on every fixture", connection_axioms),
        ("L_{#α}π(β,γ) = ⟨D_γα,β⟩ − ⟨D_βα,γ⟩ on random samples", formula_one),
        ("divergence, volume and Schouten identities on random charts", calculus_identities),
        ("Liouville suite", liouville_suite),
        ("Lie pipeline: Heisenberg passes, aff(1) fails unimodularity", lie_pipeline),
        ("jets match finite differences", autodiff_oracle),
        ("CLI exit codes and stable reports", cli_contract),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let secs = start.elapsed().as_secs_f64();
        let (verdict, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {:>2} {verdict}  {title} — {detail} [{secs:.2} s]", k + 1);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
