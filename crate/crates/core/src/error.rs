use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GofError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    /// Schema violations, one entry per offending field path.
    #[error("scenario schema errors: {}", .0.join("; "))]
    Schema(Vec<String>),
}

pub type Result<T> = std::result::Result<T, GofError>;
