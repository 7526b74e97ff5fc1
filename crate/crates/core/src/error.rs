//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by curve analysis, filtering, learning and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Signal length is not a power of two (or is shorter than 2 samples).
    #[error("invalid curve length {len}: expected a power of two >= 2")]
    InvalidLength { len: usize },

    /// A sample or score was NaN or infinite.
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// A scale parameter lies outside the admissible range.
    #[error("invalid scale: {0}")]
    InvalidScale(String),

    /// Coefficient container has malformed index ranges.
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    /// Wavelet family name not present in the registry.
    #[error("unknown wavelet family: {0:?}")]
    UnknownFamily(String),

    /// Requested count exceeds what is available.
    #[error("invalid count: {0}")]
    InvalidCount(String),

    /// An ensemble-level operation received no data.
    #[error("empty ensemble")]
    EmptyEnsemble,

    /// Index or dimension does not match between producer and consumer.
    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    /// Sample contains a single class where both are required.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Feature vectors are unusable (zero-dimensional or inconsistent).
    #[error("invalid features: {0}")]
    InvalidFeatures(String),

    /// A scalar parameter violates its precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every candidate of a model-selection sweep failed.
    #[error("dimension selection failed: {0}")]
    SelectionFailed(String),

    /// Mixture-weight calibration did not converge to the target.
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    /// Evaluation protocol is unusable for the given data.
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    /// Paired configurations differ where they must agree.
    #[error("config mismatch: {0}")]
    ConfigMismatch(String),

    /// Data could not be assembled into a usable set.
    #[error("data error: {0}")]
    DataError(String),

    /// Structural problem in an input file.
    #[error("format error at line {line}: {msg}")]
    FormatError { line: usize, msg: String },

    /// A field failed to parse as a number or label.
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
