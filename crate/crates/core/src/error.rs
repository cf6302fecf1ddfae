use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("region has no cell that both requires coverage and accepts a router")]
    NoEligibleCell,

    #[error("cell ({x}, {y}) is outside the {width}x{height} grid")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("router index {index} out of range for {len} routers")]
    RouterIndex { index: usize, len: usize },

    #[error("placement is empty")]
    EmptyPlacement,

    #[error("cover depth bookkeeping inconsistent at ({x}, {y}): {message}")]
    Inconsistent { x: usize, y: usize, message: String },

    #[error("instance too large for exhaustive search: {configurations} configurations exceed limit {limit}")]
    InstanceTooLarge { configurations: u128, limit: u128 },
}
