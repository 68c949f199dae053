//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("incomplete substitution map: no image for {0}")]
    IncompleteMap(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("unsupported Laurent input: {0}")]
    LaurentUnsupported(String),
    #[error("operator is not skew-adjoint: {0}")]
    NotSkew(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular chart map: {0}")]
    SingularMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("numeric guard tripped: {0}")]
    NumericGuard(String),
    #[error("non-finite state at t = {t}; last good sample at t = {last_good}")]
    BlowUp { t: f64, last_good: f64 },
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
