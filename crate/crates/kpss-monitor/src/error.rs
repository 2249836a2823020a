use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Polynomial order above the exact-arithmetic cap.
    #[error("polynomial order {0} exceeds the supported maximum {max}", max = crate::regress::MAX_ORDER)]
    OrderOverflow(usize),

    /// Too few observations for the requested fit.
    #[error("need at least {needed} observations for order {order}, got {got}")]
    InsufficientData {
        /// Minimum number of observations required (order + 1).
        needed: usize,
        /// Observations actually supplied.
        got: usize,
        /// Polynomial order of the attempted fit.
        order: usize,
    },

    /// Normal equations could not be solved.
    #[error("normal equations are numerically singular at t = {t}")]
    SingularSystem {
        /// Sample size at which the solve failed.
        t: usize,
    },

    /// Variance-ratio denominator vanished while the numerator did not.
    #[error("variance ratio denominator is zero while the numerator is positive")]
    DegenerateStatistic,

    /// Input stream ended before monitoring could start.
    #[error("stream ended after {got} observations, before monitoring start k = {start}")]
    InsufficientStream {
        /// Observations consumed before the stream ended.
        got: usize,
        /// First monitored time index.
        start: usize,
    },

    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A calibration table does not match the run it was asked to serve.
    #[error("calibration table incompatible with run: {0}")]
    TableMismatch(String),

    /// Requested significance level missing from a calibration table.
    #[error("calibration table has no entry for alpha = {0}")]
    AlphaNotFound(f64),

    /// Malformed numeric input.
    #[error("parse error at line {line}: {msg}")]
    Parse {
        /// 1-based line number of the offending input line.
        line: usize,
        /// Description of the problem.
        msg: String,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// TOML deserialization failure.
    #[error("TOML error: {0}")]
    Toml(#[from] Box<toml::de::Error>),
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Toml(Box::new(e))
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
