use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("operands were built against different mode layouts")]
    LayoutMismatch,

    #[error("occupation would exceed the truncation cap n_max = {n_max} on mode `{mode}`")]
    TruncationOverflow { mode: String, n_max: usize },

    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.1e}; raise the truncation")]
    LeakageExceeded { leakage: f64, tolerance: f64 },

    #[error("measured side does not carry exactly one photon")]
    NotSingularlyOccupied,

    #[error("confusion matrix row {0} is all zero")]
    DegenerateMatrix(usize),

    #[error("transition matrix rows are not probability vectors")]
    NonStochasticRows,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
