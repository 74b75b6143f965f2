//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the accounting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape of an input table does not match the region/sector index.
    #[error("dimension mismatch on {axis}: expected {expected}, found {found}")]
    Dimension {
        axis: String,
        expected: usize,
        found: usize,
    },

    /// A sector has zero gross output but carries flows or stressors.
    #[error("degenerate sector {label}: {reason}")]
    DegenerateSector { label: String, reason: String },

    /// The Leontief system does not converge (singular or non-productive).
    #[error("economy is not productive: {0}")]
    NonProductive(String),

    /// A linear system without a unique solution.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// NaN or infinity where a finite number is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Incompatible physical units.
    #[error("unit mismatch: {0}")]
    UnitMismatch(String),

    /// A region or stressor is missing from a concordance.
    #[error("concordance error: {0}")]
    Concordance(String),

    /// Ledger accounts without a mapping entry.
    #[error("unmapped accounts: {0}")]
    UnmappedAccounts(String),

    /// Invalid or incomplete configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input file.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A consumption position has no impact factor and strict mode is on.
    #[error("missing factor coverage: {0}")]
    Coverage(String),

    /// Argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Unknown or inconsistent offset scenario.
    #[error("scenario error: {0}")]
    Scenario(String),

    /// Any other invalid input.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
