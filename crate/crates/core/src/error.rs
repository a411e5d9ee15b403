use thiserror::Error;

/// Errors raised by the optimizer and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "design point outside bounds at coordinate {index}: {value} not in [{lower}, {upper}]"
    )]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("kriging fit failed: {0}")]
    Fit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("objective evaluation returned a non-finite value at sample {sample}: {values:?}")]
    NonFiniteObjective { sample: usize, values: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
