//! Numerical verification of Killing-Poisson structures on coordinate charts.
//!
//! Metrics and bivector fields are given as closed-form expressions, evaluated
//! to second-order jets at sample points, and every geometric identity is
//! checked as a pointwise residual.

pub mod expr;
pub mod fields;
pub mod contraconn;
pub mod checks;
pub mod liealg;
pub mod cli;
