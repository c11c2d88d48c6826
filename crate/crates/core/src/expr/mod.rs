//! Closed-form scalar expressions over chart coordinates, evaluated to
//! second-order jets.

mod ast;
mod eval;
mod jet;
mod parser;

pub use ast::{BinaryOp, Expr, ScalarExpr, UnaryOp};
pub use eval::{eval_jet2, eval_value};
pub use jet::{Jet2, MAX_DIM};
pub use parser::parse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("domain error in `{node}` at {point:?}: {reason}")]
    Domain {
        node: String,
        point: Vec<f64>,
        reason: String,
    },
    #[error("point has {found} coordinates, chart has {expected}")]
    PointDimension { expected: usize, found: usize },
}
