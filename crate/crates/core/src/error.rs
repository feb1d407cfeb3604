use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("site {site} out of range for a chain of {n} qubits (sites are 1-based)")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("{name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state invariant violated at step {step}: {what} (deviation {deviation:.3e})")]
    InvariantViolation {
        step: usize,
        what: &'static str,
        deviation: f64,
    },

    #[error("no sign change of {what} in [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },

    #[error("time grids differ between trajectories")]
    GridMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
