use thiserror::Error;

use crate::algebra::ModelSpec;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model mismatch: {left} vs {right}")]
    ModelMismatch { left: ModelSpec, right: ModelSpec },

    #[error("dyadic refinement to depth {depth} exceeds the model cap {max_depth}")]
    DepthExceeded { depth: u8, max_depth: u8 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("element is not invertible on the band (atom {atom} is below the inversion threshold)")]
    NotInvertibleOnBand { atom: usize },

    #[error("invalid literal: {0}")]
    InvalidLiteral(String),

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("cannot differentiate non-smooth node `{node}` at {path}")]
    NonSmoothNode { node: String, path: String },

    #[error("derivative estimate did not stabilise at atom {atom}")]
    NoConvergence { atom: usize },

    #[error("complex handle is not a polynomial: {0}")]
    NonPolynomialComplexHandle(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
