use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("malformed image stream: {0}")]
    MalformedStream(String),
    #[error("unsupported image format")]
    UnsupportedFormat,
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("original size must be positive")]
    ZeroOriginal,
    #[error("calibration corpus is empty")]
    EmptyCorpus,
    #[error("payload of {needed} bits exceeds image capacity of {capacity} bits")]
    CapacityExceeded { needed: usize, capacity: usize },
    #[error("image of {width}x{height} is too small (minimum {min} per side)")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("no residuals supplied")]
    EmptyList,
    #[error("degenerate input: plane has zero variance")]
    DegenerateInput,
    #[error("GLM classifier has no trained weights")]
    UntrainedModel,
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("logistic fit did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("corrupt fingerprint file: {0}")]
    CorruptFile(String),
    #[error("unsupported fingerprint file version {0:?}")]
    VersionMismatch(String),
    #[error("insufficient images: {0}")]
    InsufficientImages(String),
    #[error("unknown social network profile {0:?}")]
    UnknownProfile(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
