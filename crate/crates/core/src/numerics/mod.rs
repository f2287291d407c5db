//! Special functions, adaptive quadrature and partition-based differentiation.

mod faa_di_bruno;
mod hyp2f1;
mod quadrature;

pub use faa_di_bruno::{faa_di_bruno_exp, partitions, Partition, N_MAX};
pub use hyp2f1::{hyp2f1, hyp2f1_deriv, hyp2f1_neg_scaled};
pub use quadrature::{
    integrate, integrate_vec, Domain, Estimate, QuadratureSpec, SemiInfiniteMap, VecEstimate,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("2F1({a}, {b}; {c}; {z}) did not converge within the term budget")]
    Hyp2f1Divergence { a: f64, b: f64, c: f64, z: f64 },
    #[error("2F1 lower parameter c = {c} is a non-positive integer")]
    Hyp2f1Pole { c: f64 },
    #[error("2F1 argument z = {z} outside the supported range z <= 0")]
    Hyp2f1Domain { z: f64 },
    #[error(
        "quadrature tolerance not met after {subdivisions} subdivisions \
         (best estimate {value:?}, error {error:?})"
    )]
    Accuracy {
        value: Vec<f64>,
        error: Vec<f64>,
        subdivisions: usize,
    },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid quadrature setup: {0}")]
    InvalidSpec(&'static str),
    #[error("partition order {n} outside 1..={max}")]
    OrderOutOfRange { n: usize, max: usize },
    #[error("expected {expected} derivative values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

impl NumericsError {
    /// Best scalar estimate carried by an accuracy failure, if any.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            NumericsError::Accuracy { value, .. } => value.first().copied(),
            _ => None,
        }
    }
}
