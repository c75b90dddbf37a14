use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument falls outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented hypothesis of the underlying lemma is violated.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Required local data (Satake parameters, grids) is missing or malformed.
    #[error("data error: {0}")]
    Data(String),

    #[error("pole at s = 1")]
    Pole,

    /// The requested accuracy could not be reached.
    #[error("accuracy target {target:e} not reached; achieved bound {achieved:e}")]
    Accuracy { target: f64, achieved: f64 },

    /// A support or table would exceed the configured budget.
    #[error("resource budget exceeded: {what} needs {required} > budget {budget}")]
    Resource { what: String, required: u64, budget: u64 },

    #[error("empty schedule (J = 0); the first block appears once log log T >= {min_log_log_t:e}")]
    EmptySchedule { min_log_log_t: f64 },

    #[error("statistics error: {0}")]
    Statistics(String),

    /// The V-lattice is too coarse for the requested integral.
    #[error("resolution error: estimated discretisation error {estimate:.3} exceeds {limit}")]
    Resolution { estimate: f64, limit: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
