use thiserror::Error;

/// Errors shared across the matrix, projection, design and recovery layers.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("column {index} has zero norm")]
    ZeroColumn { index: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("objective became non-finite at iteration {iteration}")]
    NumericDivergence { iteration: usize },

    #[error("backtracking exhausted {halvings} halvings without sufficient decrease")]
    StepSearchFailure { halvings: usize },

    #[error("dictionary has no usable atoms")]
    DegenerateDictionary,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
