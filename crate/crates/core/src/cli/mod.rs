//! Command implementations behind the `pkt` binary.
//!
//! Exit status: 0 when every check passes, 1 when some check fails, 2 when
//! the input is invalid.

pub mod fixtures;
pub mod spec;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::checks::{
    check_casimir, check_connection, check_d_pi, check_equation_e, check_freg, check_jacobi,
    check_killing_poisson, check_killing_vector, check_kp_3d, check_liouville,
    check_liouville_identities, check_unimodular, CheckReport, SampleGrid, DEFAULT_TOL,
};
use crate::fields::ChartModel;
use crate::liealg::{
    action_homomorphism_residual, cybe_residual, induced_bivector, unimodularity_check,
};

pub use spec::{ActionSpec, CheckSummary, GridSpec, LieSpec, ManifoldSpec, ReportDocument};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Checks run when a spec lists none.
pub const DEFAULT_CHECKS: [&str; 3] = ["jacobi", "unimodular", "killing-poisson"];

/// A parsed check selector.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckKind {
    Jacobi,
    Unimodular,
    Freg,
    DPi,
    Kp3d,
    KillingPoisson,
    Connection,
    Casimir(String),
    EquationE(String),
    Killing(String),
    Liouville(String),
    LiouvilleIdentities(String, usize),
}

impl CheckKind {
    /// Parses `name` or `name:arg[:n]`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let arg = |k: usize| -> Result<String, String> {
            parts
                .get(k)
                .filter(|a| !a.is_empty())
                .map(|a| a.to_string())
                .ok_or_else(|| format!("check `{s}` needs a field name, as in `{}:NAME`", parts[0]))
        };
        let plain = |kind: CheckKind| {
            if parts.len() == 1 {
                Ok(kind)
            } else {
                Err(format!("check `{}` takes no argument", parts[0]))
            }
        };
        let named = |kind: fn(String) -> CheckKind| -> Result<CheckKind, String> {
            if parts.len() != 2 {
                return Err(format!("check `{s}` must have the form `{}:NAME`", parts[0]));
            }
            Ok(kind(arg(1)?))
        };
        match parts[0] {
            "jacobi" => plain(Self::Jacobi),
            "unimodular" => plain(Self::Unimodular),
            "freg" => plain(Self::Freg),
            "dpi" => plain(Self::DPi),
            "kp3d" => plain(Self::Kp3d),
            "killing-poisson" => plain(Self::KillingPoisson),
            "connection" => plain(Self::Connection),
            "casimir" => named(Self::Casimir),
            "equation-e" => named(Self::EquationE),
            "killing" => named(Self::Killing),
            "liouville" => named(Self::Liouville),
            "liouville-identities" => {
                let n = match parts.len() {
                    2 => 1,
                    3 => parts[2]
                        .parse::<usize>()
                        .map_err(|_| format!("check `{s}`: `{}` is not a positive integer", parts[2]))?,
                    _ => return Err(format!("check `{s}` must have the form `liouville-identities:X[:n]`")),
                };
                Ok(Self::LiouvilleIdentities(arg(1)?, n))
            }
            other => Err(format!("unknown check `{other}`")),
        }
    }

    /// Rejects references to undeclared fields before anything runs.
    fn validate(&self, model: &ChartModel) -> Result<(), String> {
        let r = match self {
            Self::Casimir(f) | Self::EquationE(f) => model.scalar(f).map(|_| ()),
            Self::Killing(x) | Self::Liouville(x) | Self::LiouvilleIdentities(x, _) => {
                model.vector(x).map(|_| ())
            }
            _ => Ok(()),
        };
        r.map_err(|e| e.to_string())
    }

    pub fn run(&self, model: &ChartModel, grid: &SampleGrid, tol: f64) -> CheckReport {
        match self {
            Self::Jacobi => check_jacobi(model, grid, tol),
            Self::Unimodular => check_unimodular(model, grid, tol),
            Self::Freg => check_freg(model, grid, tol),
            Self::DPi => check_d_pi(model, grid, tol),
            Self::Kp3d => check_kp_3d(model, grid, tol),
            Self::KillingPoisson => check_killing_poisson(model, grid, tol),
            Self::Connection => check_connection(model, grid, tol),
            Self::Casimir(f) => check_casimir(model, grid, tol, f),
            Self::EquationE(f) => match model.scalar(f) {
                Ok(e) => {
                    let mut r = check_equation_e(model, e, grid, tol);
                    r.name = format!("equation-e:{f}");
                    r
                }
                Err(e) => CheckReport::failed(format!("equation-e:{f}"), tol, e.to_string()),
            },
            Self::Killing(x) => check_killing_vector(model, grid, tol, x),
            Self::Liouville(x) => check_liouville(model, grid, tol, x),
            Self::LiouvilleIdentities(x, n) => check_liouville_identities(model, grid, tol, x, *n),
        }
    }
}

/// Parses and validates a list of check selectors against a model.
pub fn parse_checks(names: &[String], model: &ChartModel) -> Result<Vec<CheckKind>, String> {
    let names: Vec<String> = if names.is_empty() {
        DEFAULT_CHECKS.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    names
        .iter()
        .map(|n| {
            let k = CheckKind::parse(n)?;
            k.validate(model)?;
            Ok(k)
        })
        .collect()
}

/// Options shared by `check` and `lie`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub checks: Option<Vec<String>>,
    pub report: Option<PathBuf>,
}

fn fmt_point(p: &Option<Vec<f64>>) -> String {
    match p {
        Some(p) => {
            let parts: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
            format!("({})", parts.join(", "))
        }
        None => "-".into(),
    }
}

/// Writes the human-readable residual table.
pub fn write_table(out: &mut dyn Write, fixture: &str, reports: &[CheckReport]) -> std::io::Result<()> {
    writeln!(out, "fixture: {fixture}")?;
    writeln!(out, "{:<34} {:<6} {:>24}  {:>10}  worst point", "check", "result", "max residual", "tolerance")?;
    for r in reports {
        let verdict = if r.skipped {
            "skip"
        } else if r.pass {
            "pass"
        } else {
            "FAIL"
        };
        writeln!(
            out,
            "{:<34} {:<6} {:>24e}  {:>10e}  {}",
            r.name,
            verdict,
            r.max_residual,
            r.tolerance,
            fmt_point(&r.worst_point)
        )?;
        for (k, v) in &r.components {
            writeln!(out, "    {k:<30} {v:e}")?;
        }
        for (k, v) in &r.informational {
            writeln!(out, "    {k:<30} {v:e} (informational)")?;
        }
        for n in &r.notes {
            writeln!(out, "    note: {n}")?;
        }
        for e in r.errors.iter().take(5) {
            writeln!(out, "    error: {e}")?;
        }
        if r.errors.len() > 5 {
            writeln!(out, "    … {} more errors", r.errors.len() - 5)?;
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    writeln!(out, "overall: {}", if pass { "pass" } else { "FAIL" })
}

fn finish(
    fixture: &str,
    reports: &[CheckReport],
    report_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let _ = write_table(out, fixture, reports);
    if let Some(path) = report_path {
        let doc = ReportDocument::new(fixture, reports);
        if let Err(e) = fs::write(path, doc.to_json()) {
            let _ = writeln!(err, "error: cannot write report {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    if reports.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Loads a chart spec and the check plan without running anything.
pub fn load_check_plan(
    spec: &ManifoldSpec,
    opts: &RunOptions,
) -> Result<(ChartModel, SampleGrid, f64, Vec<CheckKind>), String> {
    let model = spec.to_model()?;
    let grid = spec.to_grid(opts.grid)?;
    let tol = opts.tol.or(spec.tolerance).unwrap_or(DEFAULT_TOL);
    if !(tol >= 0.0) {
        return Err(format!("tolerance {tol} must be non-negative"));
    }
    let names = opts.checks.clone().unwrap_or_else(|| spec.checks.clone());
    let checks = parse_checks(&names, &model)?;
    Ok((model, grid, tol, checks))
}

/// `pkt check <spec>`.
pub fn cmd_check(path: &Path, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let plan = read(path).and_then(|t| ManifoldSpec::from_json(&t)).and_then(|s| {
        let fixture = s
            .name
            .clone()
            .unwrap_or_else(|| path.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
        load_check_plan(&s, opts).map(|p| (fixture, p))
    });
    let (fixture, (model, grid, tol, checks)) = match plan {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let reports: Vec<CheckReport> = checks.iter().map(|c| c.run(&model, &grid, tol)).collect();
    let code = finish(&fixture, &reports, opts.report.as_deref(), out, err);
    let _ = writeln!(err, "elapsed: {:.3} s", start.elapsed().as_secs_f64());
    code
}

/// `pkt examples list`.
pub fn cmd_examples_list(lie: bool, out: &mut dyn Write) -> i32 {
    let names: &[&str] = if lie { &fixtures::LIE_FIXTURES } else { &fixtures::CHART_FIXTURES };
    for n in names {
        let _ = writeln!(out, "{n}");
    }
    EXIT_PASS
}

/// `pkt examples emit <name> <dir>`; writes `<dir>/<name>.json`.
pub fn cmd_examples_emit(
    name: &str,
    dir: &Path,
    params: Option<(f64, f64, f64)>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let text = if let Some(s) = fixtures::chart_fixture(name, params) {
        s.to_json()
    } else if let Some(s) = fixtures::lie_fixture(name) {
        s.to_json()
    } else {
        let _ = writeln!(err, "error: unknown fixture `{name}`");
        return EXIT_INVALID;
    };
    if params.is_some() && name != "quadratic-family" {
        let _ = writeln!(err, "error: parameters apply only to quadratic-family");
        return EXIT_INVALID;
    }
    let path = dir.join(format!("{name}.json"));
    if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(&path, text)) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_INVALID;
    }
    let _ = writeln!(out, "{}", path.display());
    EXIT_PASS
}

/// Runs the Lie algebra pipeline: structure constants, CYBE,
/// unimodularity of `Im r`, the action homomorphism, Killing generators,
/// and the checks on the induced bivector.
pub fn lie_pipeline(spec: &LieSpec, opts: &RunOptions) -> Result<Vec<CheckReport>, String> {
    let tol = opts.tol.or(spec.tolerance).unwrap_or(DEFAULT_TOL);
    let mut reports = Vec::new();
    let model = match spec.to_model()? {
        Ok(m) => m,
        Err(e) => {
            let mut r = CheckReport::failed("structure-jacobi", tol, e.to_string());
            r.max_residual = f64::INFINITY;
            return Ok(vec![r]);
        }
    };
    let mut structure = CheckReport::new("structure-jacobi", tol);
    structure.max_residual = model.jacobi_residual();
    reports.push(structure.finish());

    if model.r().is_none() {
        reports.push(CheckReport::skipped("cybe", tol, "no r-matrix given"));
        return Ok(reports);
    }
    let cybe = cybe_residual(&model).map_err(|e| e.to_string())?;
    let mut r = CheckReport::new("cybe", tol);
    r.max_residual = cybe.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    reports.push(r.finish());

    let mut r = CheckReport::new("unimodularity", tol);
    match unimodularity_check(&model, tol) {
        Ok(u) => {
            r.max_residual = u.traces.iter().fold(0.0f64, |a, t| a.max(t.abs()));
            r.components.insert("closure".into(), u.closure_residual);
            r.notes.push(format!("dim Im r = {}", u.image_rank));
            for (b, t) in u.basis.iter().zip(&u.traces) {
                r.notes.push(format!("tr ad_u|Im r = {t} for u = {b:?}"));
            }
        }
        Err(e) => r.errors.push(e.to_string()),
    }
    reports.push(r.finish());

    let Some(grid) = spec.action_grid()? else {
        reports.push(CheckReport::skipped("action-homomorphism", tol, "no action given"));
        return Ok(reports);
    };
    let grid = match opts.grid {
        Some(n) => SampleGrid { points_per_axis: n, ..grid },
        None => grid,
    };
    reports.push(action_homomorphism_residual(&model, &grid, tol).map_err(|e| e.to_string())?);

    let action = model.action().expect("checked above");
    let mut chart = action.chart.clone();
    for (k, g) in action.generators.iter().enumerate() {
        chart
            .add_vector_exprs(&format!("e{}", k + 1), g.clone())
            .map_err(|e| e.to_string())?;
    }
    for k in 0..model.dim() {
        reports.push(check_killing_vector(&chart, &grid, tol, &format!("e{}", k + 1)));
    }

    let induced = induced_bivector(&model).map_err(|e| e.to_string())?;
    let names = opts.checks.clone().unwrap_or_else(|| spec.checks.clone());
    for c in parse_checks(&names, &induced)? {
        let mut r = c.run(&induced, &grid, tol);
        r.name = format!("induced:{}", r.name);
        reports.push(r);
    }
    Ok(reports)
}

/// `pkt lie <spec>`.
pub fn cmd_lie(path: &Path, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let loaded = read(path).and_then(|t| LieSpec::from_json(&t));
    let result = loaded.and_then(|spec| {
        let fixture = spec
            .name
            .clone()
            .unwrap_or_else(|| path.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
        lie_pipeline(&spec, opts).map(|r| (fixture, r))
    });
    let (fixture, reports) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let code = finish(&fixture, &reports, opts.report.as_deref(), out, err);
    let _ = writeln!(err, "elapsed: {:.3} s", start.elapsed().as_secs_f64());
    code
}
