use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("face index {index} out of range for tuple of length {len}")]
    FaceIndex { index: usize, len: usize },

    #[error("boundary of a degree-0 chain is undefined")]
    DegreeZero,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("window exhausted: element `{element}` is undefined on simplex `{simplex}`")]
    WindowExhausted { element: String, simplex: String },

    #[error("complex mismatch: {0}")]
    ComplexMismatch(String),

    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),

    #[error("measure synthesis failed: {0}")]
    SynthesisFailed(String),

    #[error("witness failure: {0}")]
    Witness(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn is_window_exhaustion(&self) -> bool {
        matches!(self, Error::WindowExhausted { .. })
    }
}
