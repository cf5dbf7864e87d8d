
/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("point is not inside the open unit ball (|z| = {norm})")]
    NotInterior { norm: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no case of {family} covers these parameters: {detail}")]
    UncoveredRegime { family: String, detail: String },
    #[error("quadrature did not converge: value {value:e}, error estimate {error:e}")]
    NotConverged { value: f64, error: f64 },
    #[error("non-finite integrand value")]
    NonFinite,
    #[error("expected {expected} point(s) for this family")]
    Arity { expected: &'static str },
    #[error("no root of mu(r) = 2^-{j} in [0, 1)")]
    NoRoot { j: u32 },
    #[error("not enough usable rows for a fit: have {have}, need {need}")]
    InsufficientRows { have: usize, need: usize },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
