use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("knowledge base has an empty backbone")]
    EmptyBackbone,
    #[error(transparent)]
    Core(#[from] pexpl_core::Error),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: pexpl_core::ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
