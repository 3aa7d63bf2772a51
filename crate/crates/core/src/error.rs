use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A size or index exceeds a configured table/sieve ceiling.
    #[error("capacity: {what} requested {requested} exceeds limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    /// An argument is outside the documented domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A numerical routine could not reach the requested accuracy. Carries
    /// the best estimate and its error bound.
    #[error("accuracy: {context}: estimate {estimate} with error bound {error_bound}")]
    Accuracy {
        context: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    /// A least-squares fit had a degenerate design matrix.
    #[error("fit: {0}")]
    Fit(String),

    /// An empirical distribution was constructed from no (finite) samples.
    #[error("empty sample set")]
    EmptySamples,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// A cache file has a bad magic string, version, or inconsistent header.
    #[error("cache format: {0}")]
    CacheFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
