//! Error type shared by every module of the engine.

use thiserror::Error;

/// Errors produced by the series engine.
///
/// Arithmetic refuses to guess: mixing scalar backends, exhausting the
/// truncation budget, or leaving the representable function class are all
/// reported rather than silently absorbed.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("scalar backend mismatch: {0} vs {1}")]
    BackendMismatch(&'static str, &'static str),

    #[error("jet base point mismatch")]
    BasePointMismatch,

    #[error("truncation order exhausted: needed {needed}, available {available}")]
    OrderExhausted { needed: usize, available: usize },

    #[error("table level {needed} not built (highest level is {available})")]
    LevelUnderflow { needed: usize, available: usize },

    #[error("arity mismatch: polynomial has {expected} variables, got {got} arguments")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch at {location}: expected {expected}, got {got}")]
    DimensionMismatch {
        location: String,
        expected: usize,
        got: usize,
    },

    #[error("parts sum {sum} exceeds k = {k} in multinomial coefficient")]
    PartsExceedK { k: usize, sum: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("fractional derivative leaves the representable class: exponent {exponent} <= -1 with nonzero coefficient")]
    ExponentOutOfRange { exponent: String },

    #[error("non-integer derivative order {order} requires the float64 backend")]
    NonIntegerOrderRequiresFloat { order: String },

    #[error("fractional operators require base point 0, scene has base point {base}")]
    NonzeroBasePoint { base: String },

    #[error("chart transition is not an exact polynomial inverse pair; transformed connection would be non-polynomial")]
    NonPolynomialTransform,

    #[error("manifest error at {location}: {message}")]
    Manifest { location: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn manifest(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Manifest {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
