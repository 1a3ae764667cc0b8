use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A chaotic map left the finite range, usually because the initial
    /// condition lies outside the map's bounded basin.
    #[error("chaotic map produced a non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("degenerate bounds estimate: min = max = {value}")]
    DegenerateBounds { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("could not build an orthogonal matrix after {attempts} attempts")]
    RotationBreakdown { attempts: usize },

    #[error("random source stalled: {draws} consecutive rejected index draws")]
    SourceStalled { draws: usize },

    #[error("cannot parse source spec {spec:?}: {reason}")]
    SourceSpec { spec: String, reason: String },

    #[error("zero variance in sample; {0}")]
    ZeroVariance(&'static str),

    #[error("repetition {repeat}, source {source_label}: {inner}")]
    Run {
        repeat: usize,
        source_label: String,
        #[source]
        inner: Box<Error>,
    },

    #[error("{path}: {inner}")]
    Io {
        path: PathBuf,
        #[source]
        inner: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, inner: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            inner,
        }
    }
}
