use thiserror::Error;

/// Errors surfaced by the geometric pipelines.
#[derive(Debug, Error)]
pub enum HopfError {
    #[error("input error: {0}")]
    Input(String),

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("numerical quality: {0}")]
    NumericalQuality(String),

    #[error("unsupported parity: {0}")]
    UnsupportedParity(String),

    #[error("non-regular value after {draws} draws: {detail}")]
    NonRegularValue { draws: usize, detail: String },

    #[error("mesh ingestion: {0}")]
    Ingestion(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HopfError>;
