use thiserror::Error;

use crate::complex::VertexId;

pub type Result<T, E = HodgeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("loop at vertex {0}: clique complexes require a loop-free graph")]
    LoopNotAllowed(VertexId),

    #[error("weight {value} is not admissible for {what}")]
    InvalidWeight { what: String, value: f64 },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),

    #[error("degenerate simplex: vertex {0} repeated")]
    DegenerateSimplex(VertexId),

    #[error("tuple {0:?} is not a simplex of the complex")]
    NotASimplex(Vec<VertexId>),

    #[error("degree {degree} is out of range for {what} (max degree {max})")]
    DegreeOutOfRange { what: &'static str, degree: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("complex too large: {0} simplices exceeds the limit of {1}")]
    TooLarge(usize, usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HodgeError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        HodgeError::InvalidParameter(msg.into())
    }
}
