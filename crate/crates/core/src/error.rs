use alloc::string::String;
use core::fmt;

/// Errors returned by this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A raw sales record could not be interpreted.
    Ingestion {
        /// Zero-based index of the offending record.
        row: usize,
        /// What was wrong with it.
        reason: String,
    },
    /// A date string was not `YYYY-MM-DD`.
    InvalidDate(String),
    /// A date lies before the period epoch.
    BeforeEpoch(String),
    /// A period label such as `2023-01` or `2023-W05` was malformed.
    InvalidPeriod(String),
    /// Two vectors that must align had different lengths, or were empty.
    Length {
        /// Expected length.
        expected: usize,
        /// Actual length.
        actual: usize,
    },
    /// A value violated a domain invariant (negative sales, NaN, ...).
    InvalidValue(String),
    /// Two periods or series of different frequency were combined.
    FrequencyMismatch,
    /// The holdout would leave an empty training prefix.
    Holdout {
        /// Requested holdout length.
        holdout: usize,
        /// Length of the series being split.
        len: usize,
    },
    /// The series is too short for the requested model.
    TooShort {
        /// Minimum length the model needs.
        needed: usize,
        /// Length that was supplied.
        got: usize,
    },
    /// A numerical routine produced a non-finite value.
    NonFinite(String),
    /// A model fit failed.
    Fit(String),
    /// All paired differences were zero.
    DegenerateSample,
    /// Duplicate identifier in a corpus.
    Duplicate(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Ingestion { row, reason } => write!(f, "row {row}: {reason}"),
            Error::InvalidDate(s) => write!(f, "invalid date '{s}', expected YYYY-MM-DD"),
            Error::BeforeEpoch(s) => write!(f, "date '{s}' lies before the 2000-01 epoch"),
            Error::InvalidPeriod(s) => write!(f, "invalid period label '{s}'"),
            Error::Length { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidValue(s) => write!(f, "invalid value: {s}"),
            Error::FrequencyMismatch => write!(f, "frequency mismatch"),
            Error::Holdout { holdout, len } => {
                write!(f, "holdout {holdout} leaves no training data in a series of length {len}")
            }
            Error::TooShort { needed, got } => {
                write!(f, "series too short: need {needed} periods, got {got}")
            }
            Error::NonFinite(s) => write!(f, "non-finite value in {s}"),
            Error::Fit(s) => write!(f, "fit failed: {s}"),
            Error::DegenerateSample => write!(f, "degenerate sample: all differences are zero"),
            Error::Duplicate(s) => write!(f, "duplicate identifier '{s}'"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
