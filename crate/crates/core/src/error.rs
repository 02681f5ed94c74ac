use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("state space of size {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: usize },
    #[error("generator is not reversible (residual {0:e})")]
    NotReversible(f64),
    #[error("partition is not lumpable: states {x} and {y} disagree on rate into class {class} ({rate_x} vs {rate_y})")]
    NotLumpable {
        x: usize,
        y: usize,
        class: usize,
        rate_x: f64,
        rate_y: f64,
    },
    #[error("no bracket found below T = {0}")]
    NoBracket(f64),
    #[error("degenerate design matrix: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
