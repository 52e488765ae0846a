use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("window reversed: lo = {lo} > hi = {hi}")]
    WindowReversed { lo: f64, hi: f64 },
    #[error("pairing does not converge: {0}")]
    NonConvergence(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window too large: {needed} pairs exceed the budget of {budget}")]
    WindowTooLarge { needed: u64, budget: u64 },
    #[error("incommensurate spacings {0} and {1}")]
    Incommensurate(String, String),
    #[error("input is not periodic: {0}")]
    Aperiodic(String),
    #[error("invalid phase form: {0}")]
    InvalidPhase(String),
    #[error("spectrum violation: {0}")]
    Spectrum(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("window too small: M = {m} < 4P = {}", 4 * p)]
    WindowTooSmall { m: i64, p: i64 },
    #[error("generation failed after {0} attempts")]
    GenerationFailure(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
