use thiserror::Error;

use crate::model::Kind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("dimension mismatch: {field} is {found}D, expected {expected}D")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("kind mismatch: {field} holds {found:?} data, expected {expected:?}")]
    KindMismatch {
        field: &'static str,
        expected: Kind,
        found: Kind,
    },

    #[error("unsupported detector geometry for {operation}: {geometry}")]
    Geometry {
        operation: &'static str,
        geometry: String,
    },

    #[error("grid point {point:?} is not strictly inside the detector surface of radius {radius}")]
    OutsideAperture { point: [f64; 3], radius: f64 },

    #[error("CFL violated: v_max*dt = {lhs:.4e} exceeds h/sqrt(dim) = {rhs:.4e}")]
    Cfl { lhs: f64, rhs: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        field,
        reason: reason.into(),
    }
}
