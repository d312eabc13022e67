use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] ucpt_core::Error),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type LabResult<T> = Result<T, LabError>;
