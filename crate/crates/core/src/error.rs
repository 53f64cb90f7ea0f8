use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("empty pattern word: occurrence count is undefined")]
    EmptyPattern,

    #[error("illegal word {word:?}: {reason}")]
    IllegalWord { word: String, reason: String },

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("unknown system {name:?}; catalog: {}", catalog.join(", "))]
    UnknownSystem { name: String, catalog: Vec<String> },

    #[error("{what} of {requested} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("solution overflowed at site {site}; use the log-space cocycle product instead")]
    Overflow { site: usize },

    #[error("no exponential dichotomy at this resolution (gamma estimate {gamma:.3e} < {threshold})")]
    NoDichotomy { gamma: f64, threshold: f64 },

    #[error("energy grids differ")]
    GridMismatch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 1 usage, 2 resource cap, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 2,
            Error::NonFinite(_) | Error::Overflow { .. } | Error::NoDichotomy { .. } => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
