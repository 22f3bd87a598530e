use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("operation requires a real-valued (Hermitian) field")]
    NotReal,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A parameter violates a mathematical condition; `condition` quotes the inequality.
    #[error("{name} = {value} violates {condition}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        condition: String,
    },

    #[error("negative Riesz order s = {0} applied to a field with nonzero mean")]
    NegativeRieszOrder(f64),

    #[error("grid under-resolved: {0}")]
    UnderResolved(String),

    #[error("history covers {available} time nodes, step {requested} needs {needed}")]
    HistoryGap {
        available: usize,
        requested: usize,
        needed: usize,
    },

    #[error("Picard iteration did not converge after {iterations} iterations (last relative residual {last:.3e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residuals: Vec<f64>,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, condition: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            condition: condition.into(),
        }
    }
}
