use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid class: {0}")]
    InvalidClass(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
