use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bandwidth must be at least 1")]
    ZeroBandwidth,

    #[error("cannot compose elements of different groups ({0} and {1})")]
    GroupMismatch(&'static str, &'static str),

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("order {order} does not fit under bandwidth {bandwidth}")]
    OrderOutOfBand { order: i64, bandwidth: usize },

    #[error("spectrum is column-sparse at {found}, kernel expects {expected}")]
    SparsityMismatch { expected: i32, found: i32 },

    #[error("kernel is not a Mackey function (residual {residual:.3e} > {tolerance:.1e})")]
    NotMackey { residual: f64, tolerance: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
