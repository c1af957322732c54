use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numeric core and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("empty trace")]
    EmptyTrace,
    #[error("round {round}: propensity {pi} is not strictly inside (0, 1)")]
    NonpositivePropensity { round: usize, pi: f64 },
    #[error("allocation {0} lies on the boundary of (0, 1)")]
    BoundaryAllocation(f64),
    #[error("inverted bounds: lo = {lo} > hi = {hi}")]
    InvertedBounds { lo: f64, hi: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
