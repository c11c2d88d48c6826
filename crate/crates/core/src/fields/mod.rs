//! Tensor fields on a single chart: the metric and bivector model, the
//! per-point jet frame, and the pointwise operations built on them.

pub mod alternating;
mod chart;
mod frame;
pub mod ops;

pub use alternating::{Alternating, Form, Multivector};
pub use chart::{build, ChartModel};
pub use frame::PointFrame;
pub use ops::*;

use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("metric rejected at {point:?}: {reason}")]
    Metric { point: Vec<f64>, reason: String },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("{0} is not declared")]
    Undeclared(String),
    #[error("{0}")]
    Invalid(String),
}
