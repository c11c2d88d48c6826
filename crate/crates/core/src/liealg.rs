//! Finite-dimensional Lie algebras by structure constants: classical
//! Yang-Baxter residuals, unimodularity of `Im r`, induced bivector fields
//! of infinitesimal actions and Lie-Poisson tensors.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::checks::{pointwise, CheckReport, Component, SampleGrid};
use crate::expr::{Expr, ScalarExpr};
use crate::fields::{build, sup, vector_bracket, ChartModel, FieldError};

/// Jacobi tolerance applied to structure constants at load.
pub const STRUCTURE_JACOBI_TOL: f64 = 1e-12;
/// Relative column-space threshold for `Im r`.
pub const IMAGE_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("structure constants are not antisymmetric: c^{k}_{{{i}{j}}} ≠ −c^{k}_{{{j}{i}}}", i = .0 + 1, j = .1 + 1, k = .2 + 1)]
    NotAntisymmetric(usize, usize, usize),
    #[error("structure constants violate the Jacobi identity (residual {0:e})")]
    Jacobi(f64),
    #[error("r-matrix is not antisymmetric")]
    RNotAntisymmetric,
    #[error("no r-matrix given")]
    NoR,
    #[error("no action given")]
    NoAction,
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("Im r is not closed under the bracket (residual {0:e})")]
    NotSubalgebra(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An infinitesimal action: one vector field on `chart` per basis element.
#[derive(Debug, Clone)]
pub struct Action {
    pub chart: ChartModel,
    pub generators: Vec<Vec<ScalarExpr>>,
}

#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    dim: usize,
    /// `c[(k * dim + i) * dim + j] = c^k_{ij}`.
    c: Vec<f64>,
    r: Option<DMatrix<f64>>,
    action: Option<Action>,
}

impl LieAlgebraModel {
    /// Builds the algebra from `[e_i, e_j] = Σ_k c^k_{ij} e_k` for the listed
    /// `(i, j, k, c)` with `i ≠ j` (0-based); the `(j, i)` entries follow by
    /// antisymmetry. Validates antisymmetry and the Jacobi identity.
    pub fn new(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<Self, LieError> {
        if dim == 0 {
            return Err(LieError::Dimension("algebra dimension must be positive".into()));
        }
        let mut c = vec![0.0; dim * dim * dim];
        let at = |k: usize, i: usize, j: usize| (k * dim + i) * dim + j;
        for &(i, j, k, v) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::Dimension(format!(
                    "bracket index out of range for dimension {dim}"
                )));
            }
            if i == j {
                if v != 0.0 {
                    return Err(LieError::NotAntisymmetric(i, j, k));
                }
                continue;
            }
            let (a, b) = (at(k, i, j), at(k, j, i));
            if (c[a] != 0.0 || c[b] != 0.0) && c[a] != v {
                return Err(LieError::NotAntisymmetric(i, j, k));
            }
            c[a] = v;
            c[b] = -v;
        }
        let model = Self {
            dim,
            c,
            r: None,
            action: None,
        };
        let j = model.jacobi_residual();
        if j > STRUCTURE_JACOBI_TOL {
            return Err(LieError::Jacobi(j));
        }
        Ok(model)
    }

    pub fn with_r(mut self, r: DMatrix<f64>) -> Result<Self, LieError> {
        if r.nrows() != self.dim || r.ncols() != self.dim {
            return Err(LieError::Dimension(format!("r must be {0}×{0}", self.dim)));
        }
        if (&r + r.transpose()).amax() != 0.0 {
            return Err(LieError::RNotAntisymmetric);
        }
        self.r = Some(r);
        Ok(self)
    }

    /// `r` from its `i < j` entries.
    pub fn with_r_entries(self, entries: &[(usize, usize, f64)]) -> Result<Self, LieError> {
        let n = self.dim;
        let mut r = DMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            if i >= n || j >= n || i == j {
                return Err(LieError::Dimension(format!("bad r index ({}, {})", i + 1, j + 1)));
            }
            r[(i, j)] = v;
            r[(j, i)] = -v;
        }
        self.with_r(r)
    }

    pub fn with_action(mut self, action: Action) -> Result<Self, LieError> {
        if action.generators.len() != self.dim {
            return Err(LieError::Dimension(format!(
                "{} generators for a {}-dimensional algebra",
                action.generators.len(),
                self.dim
            )));
        }
        if action.generators.iter().any(|g| g.len() != action.chart.dim()) {
            return Err(LieError::Dimension("generator length differs from the chart dimension".into()));
        }
        self.action = Some(action);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_{ij}`.
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[(k * self.dim + i) * self.dim + j]
    }

    pub fn r(&self) -> Option<&DMatrix<f64>> {
        self.r.as_ref()
    }

    pub fn action(&self) -> Option<&Action> {
        self.action.as_ref()
    }

    /// `[u, v]` of coefficient vectors.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.c(k, i, j) * u[i] * v[j];
                }
            }
            s
        })
    }

    /// `max |Σ (c^m_{ij} c^l_{mk} + c^m_{jk} c^l_{mi} + c^m_{ki} c^l_{mj})|`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s: f64 = (0..n)
                            .map(|m| {
                                self.c(m, i, j) * self.c(l, m, k)
                                    + self.c(m, j, k) * self.c(l, m, i)
                                    + self.c(m, k, i) * self.c(l, m, j)
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    fn r_required(&self) -> Result<&DMatrix<f64>, LieError> {
        self.r.as_ref().ok_or(LieError::NoR)
    }

    /// `r(β) = (Σ_j r^{ij} β_j)_i`, so that `α(r(β)) = r(α, β) = r^{ij} α_i β_j`.
    fn r_map(&self, beta: &DVector<f64>) -> Result<DVector<f64>, LieError> {
        Ok(self.r_required()? * beta)
    }
}

/// `[r,r](α,β,γ) = α([r(β),r(γ)]) + β([r(γ),r(α)]) + γ([r(α),r(β)])` on
/// dual basis triples; returns the `i < j < k` components in lexicographic
/// order.
pub fn cybe_residual(l: &LieAlgebraModel) -> Result<Vec<f64>, LieError> {
    let n = l.dim();
    let basis = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
    let images: Vec<DVector<f64>> = (0..n).map(|i| l.r_map(&basis(i))).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = l.bracket(&images[j], &images[k])[i]
                    + l.bracket(&images[k], &images[i])[j]
                    + l.bracket(&images[i], &images[j])[k];
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Unimodularity of the subalgebra `Im r`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularityReport {
    pub image_rank: usize,
    pub basis: Vec<Vec<f64>>,
    pub traces: Vec<f64>,
    pub closure_residual: f64,
    pub unimodular: bool,
}

/// Row-reduced basis of the column space of `r`: each basis vector has a
/// 1 at its pivot coordinate and 0 at the other pivots, so coordinates in
/// the basis are read off at the pivots.
fn image_basis(r: &DMatrix<f64>) -> (Vec<DVector<f64>>, Vec<usize>) {
    let mut a = r.transpose();
    let (rows, cols) = a.shape();
    let thresh = IMAGE_RANK_TOL * a.amax();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let piv = (row..rows)
            .max_by(|&x, &y| a[(x, col)].abs().total_cmp(&a[(y, col)].abs()))
            .expect("non-empty range");
        if a[(piv, col)].abs() <= thresh {
            continue;
        }
        a.swap_rows(piv, row);
        let p = a[(row, col)];
        for k in 0..cols {
            a[(row, k)] /= p;
        }
        for other in 0..rows {
            if other != row && a[(other, col)] != 0.0 {
                let f = a[(other, col)];
                for k in 0..cols {
                    a[(other, k)] -= f * a[(row, k)];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let basis = (0..pivots.len()).map(|t| a.row(t).transpose()).collect();
    (basis, pivots)
}

/// Extracts a basis of `Im r` by row reduction, checks closure under the
/// bracket, and reports `tr(ad_u |_{Im r})` for each basis vector `u`.
pub fn unimodularity_check(l: &LieAlgebraModel, tol: f64) -> Result<UnimodularityReport, LieError> {
    let r = l.r_required()?;
    let (basis, pivots) = image_basis(r);
    let mut closure = 0.0f64;
    let mut traces = Vec::with_capacity(basis.len());
    for a in &basis {
        let mut tr = 0.0;
        for (t, b) in basis.iter().enumerate() {
            let w = l.bracket(a, b);
            let proj = basis
                .iter()
                .zip(&pivots)
                .fold(DVector::zeros(w.len()), |acc, (e, &p)| acc + e * w[p]);
            closure = closure.max((&w - &proj).amax());
            tr += w[pivots[t]];
        }
        traces.push(tr);
    }
    if closure > tol {
        return Err(LieError::NotSubalgebra(closure));
    }
    let unimodular = traces.iter().all(|t| t.abs() <= tol);
    Ok(UnimodularityReport {
        image_rank: basis.len(),
        basis: basis.iter().map(|c| c.iter().copied().collect()).collect(),
        traces,
        closure_residual: closure,
        unimodular,
    })
}

/// `max ‖[Γ(e_i), Γ(e_j)] − Σ_k c^k_{ij} Γ(e_k)‖` over the grid.
pub fn action_homomorphism_residual(
    l: &LieAlgebraModel,
    grid: &SampleGrid,
    tol: f64,
) -> Result<CheckReport, LieError> {
    let action = l.action().ok_or(LieError::NoAction)?;
    let n = l.dim();
    Ok(pointwise("action-homomorphism", &action.chart, &grid.points(), tol, |fr| {
        let gens: Vec<_> = action
            .generators
            .iter()
            .map(|g| fr.eval_all(g))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let mut b = vector_bracket(&gens[i], &gens[j]);
                for (k, g) in gens.iter().enumerate() {
                    let c = l.c(k, i, j);
                    if c != 0.0 {
                        for (bi, gi) in b.iter_mut().zip(g) {
                            *bi -= gi.scale(c);
                        }
                    }
                }
                worst = worst.max(sup(&b));
            }
        }
        Ok(vec![Component::decisive("homomorphism", worst)])
    }))
}

/// `Γ(r)` as a chart model: `π^{ab} = Σ_{i<j} r^{ij} (Γ_i^a Γ_j^b − Γ_i^b Γ_j^a)`
/// on the action's chart, keeping its metric and declared fields.
pub fn induced_bivector(l: &LieAlgebraModel) -> Result<ChartModel, LieError> {
    let r = l.r_required()?;
    let action = l.action().ok_or(LieError::NoAction)?;
    let mut model = action.chart.clone();
    let d = model.dim();
    let n = l.dim();
    for a in 0..d {
        for b in a + 1..d {
            let mut acc = Expr::Const(0.0);
            for i in 0..n {
                for j in i + 1..n {
                    let rij = r[(i, j)];
                    if rij == 0.0 {
                        continue;
                    }
                    let gi = &action.generators[i];
                    let gj = &action.generators[j];
                    let term = build::sub(
                        build::mul(gi[a].root().clone(), gj[b].root().clone()),
                        build::mul(gi[b].root().clone(), gj[a].root().clone()),
                    );
                    acc = build::add(acc, build::scale(rij, term));
                }
            }
            let e = ScalarExpr::new(acc, model.coords_arc().clone()).expect("chart variables");
            model.set_pi(a, b, e)?;
        }
    }
    Ok(model)
}

/// The Lie-Poisson tensor `π^{ij}(x) = Σ_k c^k_{ij} x_k` on `𝒢*` with
/// coordinates `names` (default `x1 … xn`) and the Euclidean metric.
pub fn lie_poisson(l: &LieAlgebraModel, names: Option<&[&str]>) -> Result<ChartModel, LieError> {
    let n = l.dim();
    let owned: Vec<String> = match names {
        Some(ns) => ns.iter().map(|s| s.to_string()).collect(),
        None => (1..=n).map(|k| format!("x{k}")).collect(),
    };
    if owned.len() != n {
        return Err(LieError::Dimension(format!("{} names for dimension {n}", owned.len())));
    }
    let mut model = ChartModel::new(&owned)?;
    for i in 0..n {
        for j in i + 1..n {
            let mut acc = Expr::Const(0.0);
            for k in 0..n {
                let c = l.c(k, i, j);
                if c != 0.0 {
                    acc = build::add(acc, build::scale(c, Expr::Var(k)));
                }
            }
            let e = ScalarExpr::new(acc, model.coords_arc().clone()).expect("chart variables");
            model.set_pi(i, j, e)?;
        }
    }
    Ok(model)
}

/// Heisenberg algebra `[e1, e2] = e3`.
pub fn heisenberg() -> LieAlgebraModel {
    LieAlgebraModel::new(3, &[(0, 1, 2, 1.0)]).expect("valid")
}

/// `so(3)` with `[e_i, e_j] = ε_{ijk} e_k`.
pub fn so3() -> LieAlgebraModel {
    LieAlgebraModel::new(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]).expect("valid")
}

/// `aff(1)` with `[e1, e2] = e2`.
pub fn aff1() -> LieAlgebraModel {
    LieAlgebraModel::new(2, &[(0, 1, 1, 1.0)]).expect("valid")
}
