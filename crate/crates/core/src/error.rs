use std::path::PathBuf;

use crate::scoring::EstimatorKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its admissible region.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Symmetric factorization failed.
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("estimator {0} is not a per-series score")]
    UnsupportedKind(EstimatorKind),

    #[error("minimization failed: {0}")]
    Minimizer(String),

    #[error("non-finite evaluation at x = {0}")]
    NonFinite(f64),

    #[error("{estimator} at {param}: {failed} of {total} replicates failed (first error: {first})")]
    ExcessiveFailures {
        estimator: EstimatorKind,
        param: f64,
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Validation-class errors map to CLI exit code 1, everything else to 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Config(_) | Error::Dimension { .. } | Error::UnsupportedKind(_)
        )
    }
}
