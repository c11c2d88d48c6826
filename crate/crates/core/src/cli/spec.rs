//! JSON documents: chart specs, Lie algebra specs and reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::checks::{CheckReport, Exclusion, SampleGrid, DEFAULT_HALF_WIDTH, DEFAULT_POINTS_PER_AXIS};
use crate::fields::ChartModel;
use crate::liealg::{Action, LieAlgebraModel};

/// Sampling section of a spec. Missing entries fall back to
/// `points_per_axis` points per axis on `[−2, 2]` in every coordinate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclusions: Vec<Exclusion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_points: Vec<Vec<f64>>,
}

impl GridSpec {
    pub fn to_grid(&self, dim: usize, points_override: Option<usize>) -> Result<SampleGrid, String> {
        let (lower, upper) = match &self.bounds {
            Some(b) => {
                if b.len() != dim {
                    return Err(format!("grid box has {} ranges for {dim} coordinates", b.len()));
                }
                (b.iter().map(|r| r[0]).collect(), b.iter().map(|r| r[1]).collect())
            }
            None => (vec![-DEFAULT_HALF_WIDTH; dim], vec![DEFAULT_HALF_WIDTH; dim]),
        };
        let grid = SampleGrid {
            lower,
            upper,
            points_per_axis: points_override
                .or(self.points_per_axis)
                .unwrap_or(DEFAULT_POINTS_PER_AXIS),
            exclusions: self.exclusions.clone(),
            extra_points: self.extra_points.clone(),
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// A metric, bivector and named fields on one chart, with the checks to run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub coords: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metric: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pi: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vectors: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub oneforms: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
}

/// Splits an `"i,j"` key into two coordinate indices (names or 1-based).
fn pair(model: &ChartModel, key: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("index key `{key}` must have the form \"i,j\""));
    }
    let i = model.coord_index(parts[0]).map_err(|e| format!("key `{key}`: {e}"))?;
    let j = model.coord_index(parts[1]).map_err(|e| format!("key `{key}`: {e}"))?;
    Ok((i, j))
}

fn located<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{what}: {e}")
}

impl ManifoldSpec {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid spec document: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_model(&self) -> Result<ChartModel, String> {
        let mut m = ChartModel::new(&self.coords).map_err(|e| e.to_string())?;
        for (k, src) in &self.metric {
            let (i, j) = pair(&m, k)?;
            m.set_metric_str(i, j, src).map_err(located(&format!("metric[{k}]")))?;
        }
        for (k, src) in &self.pi {
            let (i, j) = pair(&m, k)?;
            if i >= j {
                return Err(format!("pi[{k}]: bivector keys must satisfy i < j"));
            }
            m.set_pi_str(i, j, src).map_err(located(&format!("pi[{k}]")))?;
        }
        for (k, src) in &self.scalars {
            m.add_scalar(k, src).map_err(located(&format!("scalars[{k}]")))?;
        }
        for (k, comps) in &self.vectors {
            m.add_vector(k, comps).map_err(located(&format!("vectors[{k}]")))?;
        }
        for (k, comps) in &self.oneforms {
            m.add_oneform(k, comps).map_err(located(&format!("oneforms[{k}]")))?;
        }
        Ok(m)
    }

    pub fn to_grid(&self, points_override: Option<usize>) -> Result<SampleGrid, String> {
        self.grid
            .clone()
            .unwrap_or_default()
            .to_grid(self.coords.len(), points_override)
    }
}

/// The action part of a Lie algebra spec.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub coords: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metric: BTreeMap<String, String>,
    pub generators: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

/// A Lie algebra by its nonzero brackets `"i,j" → {"k": c^k_ij}` (1-based,
/// `i < j`), an optional r-matrix `"i,j" → r^{ij}` and an optional action.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    #[serde(default)]
    pub brackets: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
}

fn basis_index(dim: usize, s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(k) if (1..=dim).contains(&k) => Ok(k - 1),
        _ => Err(format!("basis index `{s}` is not in 1..={dim}")),
    }
}

fn basis_pair(dim: usize, key: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("index key `{key}` must have the form \"i,j\""));
    }
    let (i, j) = (basis_index(dim, parts[0])?, basis_index(dim, parts[1])?);
    if i >= j {
        return Err(format!("key `{key}` must satisfy i < j"));
    }
    Ok((i, j))
}

impl LieSpec {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid Lie algebra document: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// `(i, j, k, c)` bracket entries, 0-based.
    pub fn bracket_entries(&self) -> Result<Vec<(usize, usize, usize, f64)>, String> {
        let mut out = Vec::new();
        for (key, terms) in &self.brackets {
            let (i, j) = basis_pair(self.dim, key)?;
            for (k, c) in terms {
                out.push((i, j, basis_index(self.dim, k)?, *c));
            }
        }
        Ok(out)
    }

    /// The algebra with `r` and the action attached. Structure constants are
    /// validated by the model; that error is returned separately so callers
    /// can report it as a failed stage.
    pub fn to_model(&self) -> Result<Result<LieAlgebraModel, crate::liealg::LieError>, String> {
        let entries = self.bracket_entries()?;
        let model = match LieAlgebraModel::new(self.dim, &entries) {
            Ok(m) => m,
            Err(e @ crate::liealg::LieError::Jacobi(_)) => return Ok(Err(e)),
            Err(e) => return Err(e.to_string()),
        };
        let mut model = model;
        if let Some(r) = &self.r {
            let mut rs = Vec::new();
            for (k, v) in r {
                let (i, j) = basis_pair(self.dim, k)?;
                rs.push((i, j, *v));
            }
            model = model.with_r_entries(&rs).map_err(|e| e.to_string())?;
        }
        if let Some(a) = &self.action {
            let spec = ManifoldSpec {
                coords: a.coords.clone(),
                metric: a.metric.clone(),
                ..Default::default()
            };
            let chart = spec.to_model()?;
            let generators = a
                .generators
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    if g.len() != chart.dim() {
                        return Err(format!("generator {} has {} components", k + 1, g.len()));
                    }
                    g.iter()
                        .map(|s| chart.parse(s).map_err(located(&format!("generator {}", k + 1))))
                        .collect()
                })
                .collect::<Result<Vec<_>, String>>()?;
            model = model
                .with_action(Action { chart, generators })
                .map_err(|e| e.to_string())?;
        }
        Ok(Ok(model))
    }

    pub fn action_grid(&self) -> Result<Option<SampleGrid>, String> {
        match &self.action {
            Some(a) => Ok(Some(a.grid.clone().unwrap_or_default().to_grid(a.coords.len(), None)?)),
            None => Ok(None),
        }
    }
}

/// The per-check part of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub pass: bool,
    pub skipped: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub components: BTreeMap<String, f64>,
    pub informational: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub errors: Vec<String>,
}

impl From<&CheckReport> for CheckSummary {
    fn from(r: &CheckReport) -> Self {
        Self {
            name: r.name.clone(),
            pass: r.pass,
            skipped: r.skipped,
            tolerance: r.tolerance,
            max_residual: r.max_residual,
            worst_point: r.worst_point.clone(),
            components: r.components.clone(),
            informational: r.informational.clone(),
            notes: r.notes.clone(),
            errors: r.errors.clone(),
        }
    }
}

/// Machine-readable report. Deterministic: no timestamps or timings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub fixture: String,
    pub pass: bool,
    pub checks: Vec<CheckSummary>,
}

impl ReportDocument {
    pub fn new(fixture: impl Into<String>, reports: &[CheckReport]) -> Self {
        Self {
            fixture: fixture.into(),
            pass: reports.iter().all(|r| r.pass),
            checks: reports.iter().map(CheckSummary::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}
