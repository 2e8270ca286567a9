use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed line in an input document. `source_name` identifies the
    /// document ("features", "interactions", "candidates"); `line` is 1-based.
    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error("iteration did not converge within {0} steps")]
    NonConvergence(usize),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// Metric failure during the leave-one-out experiment, tagged with the
    /// edge that was held out when it happened.
    #[error("while holding out edge {a},{b}: {source}")]
    Holdout {
        a: String,
        b: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn stage(stage: &'static str, source: Error) -> Self {
        Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
