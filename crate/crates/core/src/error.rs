use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `1 − Γ·S` is (numerically) zero: a resonant, non-physical input.
    #[error("degenerate cascade: |1 - gamma*s| = {denominator:e} is below threshold")]
    DegenerateCascade { denominator: f64 },

    #[error("insufficient samples for the fit: {0}")]
    InsufficientSamples(String),

    #[error("phase unwrap failed between codes {from:#b} and {to:#b}: jump of {jump_deg:.2} deg is ambiguous")]
    UnwrapFailure { from: u32, to: u32, jump_deg: f64 },

    #[error("touchstone syntax error on line {line}: {message}")]
    TouchstoneSyntax { line: usize, message: String },

    #[error("unsupported touchstone content: {0}")]
    UnsupportedFormat(String),

    #[error("invalid radiation pattern: {0}")]
    InvalidPattern(String),

    #[error("distance between {0} is zero")]
    ZeroDistance(&'static str),

    #[error("source lies behind the plate (cos of incidence = {cos_incidence:.3e})")]
    BackIncidence { cos_incidence: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("exhaustive search of {states} states exceeds the budget of {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("config validation error: {0}")]
    Validation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
