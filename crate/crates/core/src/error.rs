use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infeasible long-range link count: requested {requested}, only {available} free node pairs")]
    InfeasibleLinks { requested: usize, available: usize },

    #[error("long-range link sampling gave up after {attempts} rejected draws")]
    RetryLimitExceeded { attempts: u64 },

    #[error("infeasible seed: {0}")]
    InfeasibleSeed(String),

    #[error("network has no long-range links")]
    NoLongRangeLinks,

    #[error("experiment infeasible: all {failures} replicates failed")]
    ExperimentInfeasible { failures: usize },

    #[error("estimate unavailable: {0}")]
    EstimateUnavailable(String),

    #[error("config line {line}, key `{key}`: {message}")]
    Parse {
        key: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for [`Error::InvalidParameter`].
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
