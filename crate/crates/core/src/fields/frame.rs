use nalgebra::DMatrix;

use crate::expr::{eval_jet2, Jet2, ScalarExpr};

use super::alternating::{Form, Multivector};
use super::chart::ChartModel;
use super::FieldError;

/// Everything the tensor operations need at one point: jets of the metric,
/// its inverse, the volume density and the bivector.
#[derive(Debug, Clone)]
pub struct PointFrame<'m> {
    model: &'m ChartModel,
    point: Vec<f64>,
    g: Vec<Jet2>,
    g_inv: Vec<Jet2>,
    sqrt_det: Jet2,
    pi: Vec<Jet2>,
}

/// Inverse and determinant of a square jet matrix by Gauss-Jordan
/// elimination with partial pivoting on the values.
pub(crate) fn invert_jets(n: usize, a: &[Jet2]) -> Option<(Vec<Jet2>, Jet2)> {
    let mut m = a.to_vec();
    let mut inv: Vec<Jet2> = (0..n * n)
        .map(|k| Jet2::constant(n, if k / n == k % n { 1.0 } else { 0.0 }))
        .collect();
    let mut det = Jet2::constant(n, 1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| {
            m[r * n + col]
                .value()
                .abs()
                .total_cmp(&m[s * n + col].value().abs())
        })?;
        if m[piv * n + col].value() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        let pr = p.recip();
        for k in 0..n {
            m[col * n + k] = m[col * n + k] * pr;
            inv[col * n + k] = inv[col * n + k] * pr;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            for k in 0..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
                inv[r * n + k] = inv[r * n + k] - f * inv[col * n + k];
            }
        }
    }
    Some((inv, det))
}

impl<'m> PointFrame<'m> {
    /// Evaluates the model at `point`, rejecting metrics that are not
    /// positive definite or are numerically degenerate there.
    pub fn new(model: &'m ChartModel, point: &[f64]) -> Result<Self, FieldError> {
        let n = model.dim();
        if point.len() != n {
            return Err(FieldError::Dimension(format!(
                "point has {} coordinates, chart has {n}",
                point.len()
            )));
        }
        let mut g = vec![Jet2::constant(n, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = eval_jet2(model.metric_expr(i, j), point)?;
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        let values = DMatrix::from_fn(n, n, |i, j| g[i * n + j].value());
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::Metric {
                point: point.to_vec(),
                reason: "non-finite metric component".into(),
            });
        }
        if values.clone().cholesky().is_none() {
            return Err(FieldError::Metric {
                point: point.to_vec(),
                reason: "metric is not positive definite".into(),
            });
        }
        let (g_inv, det) = invert_jets(n, &g).ok_or_else(|| FieldError::Metric {
            point: point.to_vec(),
            reason: "metric is singular".into(),
        })?;
        let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).powi(n as i32);
        if det.value() <= 1e-12 * scale {
            return Err(FieldError::Metric {
                point: point.to_vec(),
                reason: format!("degenerate metric, det g = {:e}", det.value()),
            });
        }
        // g·g⁻¹ = I, relative to the conditioning of the pair
        let inv_values = DMatrix::from_fn(n, n, |i, j| g_inv[i * n + j].value());
        let resid = (&values * &inv_values - DMatrix::identity(n, n)).amax();
        let cond = values.amax() * inv_values.amax() * n as f64;
        if resid > 1e-12 * cond.max(1.0) {
            return Err(FieldError::Metric {
                point: point.to_vec(),
                reason: format!("metric inverse inaccurate (residual {resid:e})"),
            });
        }
        let mut pi = vec![Jet2::constant(n, 0.0); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let e = model.pi_expr(i, j);
                if e.is_zero() {
                    continue;
                }
                let v = eval_jet2(e, point)?;
                pi[i * n + j] = v;
                pi[j * n + i] = -v;
            }
        }
        Ok(Self {
            model,
            point: point.to_vec(),
            g,
            g_inv,
            sqrt_det: det.sqrt(),
            pi,
        })
    }

    pub fn model(&self) -> &'m ChartModel {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn g(&self, i: usize, j: usize) -> Jet2 {
        self.g[i * self.dim() + j]
    }

    pub fn g_inv(&self, i: usize, j: usize) -> Jet2 {
        self.g_inv[i * self.dim() + j]
    }

    pub fn pi(&self, i: usize, j: usize) -> Jet2 {
        self.pi[i * self.dim() + j]
    }

    /// `√det g` with its jet.
    pub fn sqrt_det(&self) -> Jet2 {
        self.sqrt_det
    }

    pub fn pi_multivector(&self) -> Multivector {
        Multivector::from_matrix(self.dim(), &self.pi)
    }

    /// `π(p)` as a plain matrix.
    pub fn pi_values(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.pi(i, j).value())
    }

    pub fn g_values(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.g(i, j).value())
    }

    pub fn g_inv_values(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.g_inv(i, j).value())
    }

    /// The Riemannian volume form `√det g dx¹∧…∧dxⁿ`.
    pub fn volume_form(&self) -> Form {
        let n = self.dim();
        let mut mu = Form::zero(n, n);
        mu.set(&(0..n).collect::<Vec<_>>(), self.sqrt_det);
        mu
    }

    pub fn eval(&self, e: &ScalarExpr) -> Result<Jet2, FieldError> {
        Ok(eval_jet2(e, &self.point)?)
    }

    pub fn eval_all(&self, es: &[ScalarExpr]) -> Result<Vec<Jet2>, FieldError> {
        es.iter().map(|e| self.eval(e)).collect()
    }

    pub fn scalar(&self, name: &str) -> Result<Jet2, FieldError> {
        self.eval(self.model.scalar(name)?)
    }

    pub fn vector(&self, name: &str) -> Result<Vec<Jet2>, FieldError> {
        self.eval_all(self.model.vector(name)?)
    }

    pub fn oneform(&self, name: &str) -> Result<Vec<Jet2>, FieldError> {
        self.eval_all(self.model.oneform(name)?)
    }

    /// Constant-coefficient field with the given components.
    pub fn constant_field(&self, comps: &[f64]) -> Vec<Jet2> {
        comps.iter().map(|c| Jet2::constant(self.dim(), *c)).collect()
    }

    /// The coordinate covector field `dx^k`.
    pub fn basis_covector(&self, k: usize) -> Vec<Jet2> {
        let n = self.dim();
        (0..n)
            .map(|i| Jet2::constant(n, if i == k { 1.0 } else { 0.0 }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant_jets() {
        let mut m = ChartModel::new(&["r", "t"]).unwrap();
        m.set_metric_str(1, 1, "r^2").unwrap();
        let fr = PointFrame::new(&m, &[2.0, 0.3]).unwrap();
        assert_eq!(fr.g_inv(1, 1).value(), 0.25);
        // ∂_r (1/r²) = -2/r³
        assert!((fr.g_inv(1, 1).grad()[0] + 0.25).abs() < 1e-15);
        assert_eq!(fr.sqrt_det().value(), 2.0);
        assert!((fr.sqrt_det().grad()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pivoting_inverse_matches_nalgebra() {
        let mut m = ChartModel::new(&["x", "y", "z"]).unwrap();
        m.set_metric_str(0, 0, "0.01 + z^2").unwrap();
        m.set_metric_str(0, 1, "0.3*x").unwrap();
        m.set_metric_str(1, 1, "2 + y").unwrap();
        m.set_metric_str(1, 2, "-0.2").unwrap();
        m.set_metric_str(2, 2, "3").unwrap();
        let fr = PointFrame::new(&m, &[0.5, 0.1, 1.2]).unwrap();
        let inv = fr.g_values().try_inverse().unwrap();
        assert!((inv - fr.g_inv_values()).amax() < 1e-13);
        assert!((fr.g_values().determinant().sqrt() - fr.sqrt_det().value()).abs() < 1e-13);
    }

    #[test]
    fn indefinite_and_degenerate_metrics_rejected() {
        let mut m = ChartModel::new(&["x", "y"]).unwrap();
        m.set_metric_str(1, 1, "-1").unwrap();
        assert!(matches!(
            PointFrame::new(&m, &[0.0, 0.0]),
            Err(FieldError::Metric { .. })
        ));
        let mut m = ChartModel::new(&["x", "y"]).unwrap();
        m.set_metric_str(1, 1, "x^2").unwrap();
        assert!(PointFrame::new(&m, &[0.0, 1.0]).is_err());
        assert!(PointFrame::new(&m, &[1e-7, 1.0]).is_err());
        assert!(PointFrame::new(&m, &[0.5, 1.0]).is_ok());
    }
}
