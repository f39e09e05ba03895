use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed tree document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown {kind} `{id}`")]
    DanglingReference { kind: &'static str, id: String },

    #[error("duplicate {kind} `{id}`")]
    Duplicate { kind: &'static str, id: String },

    #[error("{0}")]
    InvalidValue(String),

    #[error("negative duration {0}")]
    NegativeDuration(i64),

    #[error("train `{train}`: event times at `{station}` are not monotone")]
    NonMonotone { train: String, station: String },

    #[error("train `{train}` visits station `{station}` more than once; each train may visit a station at most once")]
    StationRevisit { train: String, station: String },

    #[error("no running time for segment `{segment}` with pattern {pattern}")]
    MissingRunTime { segment: String, pattern: String },

    #[error("invalid request: {0}")]
    Request(String),

    #[error("time-expanded graph would exceed {cap} nodes ({nodes})")]
    OracleTooLarge { nodes: usize, cap: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches a line number to value-level errors raised while parsing.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { .. } => self,
            other => Error::Parse {
                line,
                message: other.to_string(),
            },
        }
    }
}
