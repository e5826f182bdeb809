use thiserror::Error;

/// Errors produced by grid construction, spectral operations and runs.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too coarse for dyadic blocks: max |k| = {kmax} < 3/4")]
    DegenerateGrid { kmax: f64 },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("non-finite value encountered at t = {t}: numerical blow-up")]
    BlowUp { t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty ledger")]
    EmptyLedger,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
