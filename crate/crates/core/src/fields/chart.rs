use std::collections::BTreeMap;
use std::sync::Arc;

use crate::expr::{parse, BinaryOp, Expr, ScalarExpr, UnaryOp, MAX_DIM};

use super::FieldError;

/// A metric, a bivector field and named auxiliary fields on one chart.
///
/// The metric is stored in full (both symmetric slots share one expression)
/// and the bivector by its `i < j` components; `π^{ji} = -π^{ij}` and
/// `π^{ii} = 0` hold by construction.
#[derive(Debug, Clone)]
pub struct ChartModel {
    coords: Arc<[String]>,
    metric: Vec<ScalarExpr>,
    pi: Vec<ScalarExpr>,
    scalars: BTreeMap<String, ScalarExpr>,
    vectors: BTreeMap<String, Vec<ScalarExpr>>,
    oneforms: BTreeMap<String, Vec<ScalarExpr>>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

impl ChartModel {
    /// Euclidean metric and zero bivector on the given coordinates.
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Self, FieldError> {
        let names: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() || names.len() > MAX_DIM {
            return Err(FieldError::Dimension(format!(
                "chart dimension must be in 1..={MAX_DIM}, got {}",
                names.len()
            )));
        }
        for (k, n) in names.iter().enumerate() {
            let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok {
                return Err(FieldError::Invalid(format!("`{n}` is not an identifier")));
            }
            if names[..k].contains(n) {
                return Err(FieldError::Invalid(format!("duplicate coordinate `{n}`")));
            }
        }
        let coords: Arc<[String]> = names.into();
        let n = coords.len();
        let metric = (0..n * n)
            .map(|k| ScalarExpr::constant(if k / n == k % n { 1.0 } else { 0.0 }, coords.clone()))
            .collect();
        let pi = vec![ScalarExpr::constant(0.0, coords.clone()); n * (n - 1) / 2];
        Ok(Self {
            coords,
            metric,
            pi,
            scalars: BTreeMap::new(),
            vectors: BTreeMap::new(),
            oneforms: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coords_arc(&self) -> &Arc<[String]> {
        &self.coords
    }

    pub fn parse(&self, source: &str) -> Result<ScalarExpr, FieldError> {
        Ok(parse(source, &self.coords)?)
    }

    /// Resolves `name` to a coordinate index, accepting either the coordinate
    /// name or a 1-based position.
    pub fn coord_index(&self, name: &str) -> Result<usize, FieldError> {
        let name = name.trim();
        if let Some(i) = self.coords.iter().position(|c| c == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(k) if (1..=self.dim()).contains(&k) => Ok(k - 1),
            _ => Err(FieldError::Invalid(format!("no coordinate `{name}`"))),
        }
    }

    fn check_index(&self, i: usize) -> Result<(), FieldError> {
        if i >= self.dim() {
            return Err(FieldError::Invalid(format!(
                "index {} out of range for dimension {}",
                i + 1,
                self.dim()
            )));
        }
        Ok(())
    }

    fn check_expr(&self, e: &ScalarExpr) -> Result<(), FieldError> {
        if e.coords() != &*self.coords {
            return Err(FieldError::Invalid(format!(
                "expression `{e}` belongs to a different chart"
            )));
        }
        Ok(())
    }

    pub fn set_metric(&mut self, i: usize, j: usize, e: ScalarExpr) -> Result<(), FieldError> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_expr(&e)?;
        let n = self.dim();
        self.metric[i * n + j] = e.clone();
        self.metric[j * n + i] = e;
        Ok(())
    }

    pub fn set_metric_str(&mut self, i: usize, j: usize, src: &str) -> Result<(), FieldError> {
        let e = self.parse(src)?;
        self.set_metric(i, j, e)
    }

    /// Sets `π^{ij}`; for `i > j` the negated expression is stored as `π^{ji}`.
    pub fn set_pi(&mut self, i: usize, j: usize, e: ScalarExpr) -> Result<(), FieldError> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_expr(&e)?;
        if i == j {
            return Err(FieldError::Invalid(
                "diagonal bivector components are zero".into(),
            ));
        }
        let n = self.dim();
        if i < j {
            self.pi[upper_index(n, i, j)] = e;
        } else {
            let neg = ScalarExpr::new(Expr::unary(UnaryOp::Neg, e.root().clone()), self.coords.clone())
                .expect("same chart");
            self.pi[upper_index(n, j, i)] = neg;
        }
        Ok(())
    }

    pub fn set_pi_str(&mut self, i: usize, j: usize, src: &str) -> Result<(), FieldError> {
        let e = self.parse(src)?;
        self.set_pi(i, j, e)
    }

    pub fn add_scalar(&mut self, name: &str, src: &str) -> Result<(), FieldError> {
        let e = self.parse(src)?;
        self.scalars.insert(name.to_string(), e);
        Ok(())
    }

    pub fn add_vector<S: AsRef<str>>(&mut self, name: &str, comps: &[S]) -> Result<(), FieldError> {
        let v = self.parse_components(comps)?;
        self.vectors.insert(name.to_string(), v);
        Ok(())
    }

    pub fn add_oneform<S: AsRef<str>>(&mut self, name: &str, comps: &[S]) -> Result<(), FieldError> {
        let v = self.parse_components(comps)?;
        self.oneforms.insert(name.to_string(), v);
        Ok(())
    }

    pub fn add_vector_exprs(&mut self, name: &str, comps: Vec<ScalarExpr>) -> Result<(), FieldError> {
        if comps.len() != self.dim() {
            return Err(FieldError::Dimension(format!(
                "vector `{name}` has {} components, chart has {}",
                comps.len(),
                self.dim()
            )));
        }
        for c in &comps {
            self.check_expr(c)?;
        }
        self.vectors.insert(name.to_string(), comps);
        Ok(())
    }

    fn parse_components<S: AsRef<str>>(&self, comps: &[S]) -> Result<Vec<ScalarExpr>, FieldError> {
        if comps.len() != self.dim() {
            return Err(FieldError::Dimension(format!(
                "{} components given for a {}-dimensional chart",
                comps.len(),
                self.dim()
            )));
        }
        comps.iter().map(|s| self.parse(s.as_ref())).collect()
    }

    pub fn metric_expr(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.metric[i * self.dim() + j]
    }

    /// `π^{ij}` for `i < j`.
    pub fn pi_expr(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.pi[upper_index(self.dim(), i, j)]
    }

    pub fn scalar(&self, name: &str) -> Result<&ScalarExpr, FieldError> {
        self.scalars
            .get(name)
            .ok_or_else(|| FieldError::Undeclared(format!("scalar `{name}`")))
    }

    pub fn vector(&self, name: &str) -> Result<&[ScalarExpr], FieldError> {
        self.vectors
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| FieldError::Undeclared(format!("vector `{name}`")))
    }

    pub fn oneform(&self, name: &str) -> Result<&[ScalarExpr], FieldError> {
        self.oneforms
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| FieldError::Undeclared(format!("1-form `{name}`")))
    }

    pub fn scalars(&self) -> &BTreeMap<String, ScalarExpr> {
        &self.scalars
    }

    pub fn vectors(&self) -> &BTreeMap<String, Vec<ScalarExpr>> {
        &self.vectors
    }

    pub fn oneforms(&self) -> &BTreeMap<String, Vec<ScalarExpr>> {
        &self.oneforms
    }

    /// True when every metric slot is the literal identity.
    pub fn is_euclidean(&self) -> bool {
        let n = self.dim();
        self.metric.iter().enumerate().all(|(k, e)| {
            matches!(e.root(), Expr::Const(c) if *c == if k / n == k % n { 1.0 } else { 0.0 })
        })
    }
}

/// Small expression algebra used to assemble derived fields (for example
/// the bivector induced by a Lie algebra action). Literal zeros and ones are
/// folded so the results stay readable.
pub mod build {
    use super::*;

    fn zero(e: &Expr) -> bool {
        matches!(e, Expr::Const(c) if *c == 0.0)
    }

    fn one(e: &Expr) -> bool {
        matches!(e, Expr::Const(c) if *c == 1.0)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if zero(&a) => b,
            _ if zero(&b) => a,
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (_, Expr::Unary(UnaryOp::Neg, inner)) => Expr::binary(BinaryOp::Sub, a, (**inner).clone()),
            _ => Expr::binary(BinaryOp::Add, a, b),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        add(a, neg(b))
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) if c == 0.0 => Expr::Const(0.0),
            Expr::Unary(UnaryOp::Neg, inner) => *inner,
            other => Expr::unary(UnaryOp::Neg, other),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if zero(&a) || zero(&b) => Expr::Const(0.0),
            _ if one(&a) => b,
            _ if one(&b) => a,
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            _ => Expr::binary(BinaryOp::Mul, a, b),
        }
    }

    /// `c · a` for a real constant, keeping literals non-negative.
    pub fn scale(c: f64, a: Expr) -> Expr {
        if c < 0.0 {
            neg(mul(Expr::Const(-c), a))
        } else {
            mul(Expr::Const(c), a)
        }
    }
}
