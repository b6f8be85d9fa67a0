use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("wavevector component {component} on axis {axis} is not a grid wavenumber")]
    OffGrid { axis: usize, component: f64 },

    #[error("initial data under-resolved: edge tail ratio {ratio:e} exceeds {threshold:e}")]
    Underresolved { ratio: f64, threshold: f64 },

    #[error("oracle size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown weight derivative selector '{0}'")]
    UnknownSelector(String),

    #[error("empty series")]
    EmptySeries,

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
