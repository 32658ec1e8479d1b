use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualityError {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("outside the domain of the measure: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, DualityError>;
