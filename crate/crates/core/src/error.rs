use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by graph construction, spectral analysis, recurrences,
/// iterations and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A graph or experiment specification violates its own invariants.
    #[error("invalid specification: {0}")]
    Spec(String),

    /// An operation was called on an input it does not support
    /// (e.g. `A/d` on a non-regular graph).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numeric parameter lies outside its domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// The request exceeds what the dense code paths are configured for.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// Not enough usable samples for a slope or dimension estimate.
    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The measure has no mass away from 1, so there is nothing to orthogonalize.
    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

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
    /// True for errors caused by user-supplied configuration, as opposed to
    /// I/O failures. The CLI maps these to exit code 2.
    pub fn is_config_error(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
