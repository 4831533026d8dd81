use thiserror::Error;

/// Errors raised by the game engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented invariant.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    /// A constructed matrix has an entry outside its admissible range.
    #[error("entry {entry} = {value} lies outside [0, 1]")]
    EntryOutOfRange { entry: String, value: f64 },

    #[error("parameter {name} = {value} outside its admissible interval {interval}")]
    Parameter {
        name: &'static str,
        value: f64,
        interval: String,
    },

    /// The map lacks a unique attracting fixed point.
    #[error("Perron-Frobenius fixed point not found: {0}")]
    NoFixedPoint(String),

    #[error("singular matrix in linear solve")]
    Singular,

    /// Walk amplitude reached the edge of the truncation window.
    #[error("walk leaked out of window: edge amplitude {amplitude:e}")]
    Leakage { amplitude: f64 },

    #[error("numerical procedure failed: {0}")]
    Numerical(String),

    #[error("no feasible point found after {restarts} restarts")]
    Infeasible { restarts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
