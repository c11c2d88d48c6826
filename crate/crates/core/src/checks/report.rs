use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::fields::{ChartModel, PointFrame};

/// Residual of one check at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    pub residual: f64,
}

/// Outcome of one check over a sample grid.
///
/// `pass` holds exactly when the sample was evaluated without errors, the
/// check was not skipped, and `max_residual ≤ tolerance`. Informational
/// residuals are reported but never decide the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub tolerance: f64,
    pub pass: bool,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub components: BTreeMap<String, f64>,
    pub informational: BTreeMap<String, f64>,
    pub points: Vec<PointResidual>,
    pub notes: Vec<String>,
    pub errors: Vec<String>,
    pub skipped: bool,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            pass: false,
            max_residual: 0.0,
            worst_point: None,
            components: BTreeMap::new(),
            informational: BTreeMap::new(),
            points: Vec::new(),
            notes: Vec::new(),
            errors: Vec::new(),
            skipped: false,
        }
    }

    /// A check that could not run; it does not pass.
    pub fn skipped(name: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        let mut r = Self::new(name, tolerance);
        r.skipped = true;
        r.notes.push(reason.into());
        r
    }

    /// A check rejected before evaluation (missing field, wrong dimension).
    pub fn failed(name: impl Into<String>, tolerance: f64, error: impl Into<String>) -> Self {
        let mut r = Self::new(name, tolerance);
        r.errors.push(error.into());
        r
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.get(name).copied()
    }

    /// Residual recorded at `point`, if it was sampled.
    pub fn residual_at(&self, point: &[f64]) -> Option<f64> {
        self.points.iter().find(|p| p.point == point).map(|p| p.residual)
    }

    /// Sets `pass` from the residuals, errors and skip flag.
    pub fn finish(mut self) -> Self {
        self.pass = !self.skipped
            && self.errors.is_empty()
            && self.max_residual.is_finite()
            && self.max_residual <= self.tolerance;
        self
    }
}

/// One named residual at a point. Decisive residuals enter the verdict.
#[derive(Debug, Clone)]
pub struct Component {
    pub name: String,
    pub value: f64,
    pub decisive: bool,
}

impl Component {
    pub fn decisive(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            decisive: true,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            decisive: false,
        }
    }
}

/// Evaluates `f` at every point (in parallel) and folds the results into a
/// report in point order.
pub fn pointwise<F>(name: &str, model: &ChartModel, points: &[Vec<f64>], tol: f64, f: F) -> CheckReport
where
    F: Fn(&PointFrame) -> Result<Vec<Component>, String> + Sync,
{
    let results: Vec<Result<Vec<Component>, String>> = points
        .par_iter()
        .map(|p| {
            let fr = PointFrame::new(model, p).map_err(|e| e.to_string())?;
            f(&fr)
        })
        .collect();
    let mut report = CheckReport::new(name, tol);
    for (p, res) in points.iter().zip(results) {
        match res {
            Ok(comps) => {
                let mut here = 0.0f64;
                for c in comps {
                    let v = if c.value.is_nan() { f64::INFINITY } else { c.value.abs() };
                    let slot = if c.decisive {
                        here = here.max(v);
                        &mut report.components
                    } else {
                        &mut report.informational
                    };
                    let e = slot.entry(c.name).or_insert(0.0);
                    *e = e.max(v);
                }
                if report.worst_point.is_none() || here > report.max_residual {
                    report.max_residual = here;
                    report.worst_point = Some(p.clone());
                }
                report.points.push(PointResidual {
                    point: p.clone(),
                    residual: here,
                });
            }
            Err(e) => report.errors.push(format!("at {p:?}: {e}")),
        }
    }
    if report.points.is_empty() && report.errors.is_empty() {
        report.errors.push("no sample points".into());
    }
    report.finish()
}
