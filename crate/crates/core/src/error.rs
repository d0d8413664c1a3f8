use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("word length exceeds the cap of {cap}")]
    CapExceeded { cap: u32 },
    #[error("resource budget exhausted during {what} (reached {reached})")]
    ResourceExhausted { what: String, reached: u64 },
    #[error("tiling violation at level {k}: {first} and {second} give the same element")]
    TilingViolation {
        k: usize,
        first: String,
        second: String,
    },
    #[error("element does not lie in tile T_{k}")]
    NotInTile { k: usize },
    #[error("no depth up to {max_depth} absorbs the move")]
    DepthExhausted { max_depth: usize },
    #[error("carry ran more than {bound} coordinates past the realized window")]
    WindowExhausted { bound: usize },
    #[error("orbit truncated: {0}")]
    Truncation(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
