use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight exponent s = {0} must be strictly greater than ln 3")]
    WeightBelowThreshold(String),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(String),

    #[error("generator x{0} has no assigned map")]
    UnassignedGenerator(u32),

    #[error("{0} has no exact rational value; evaluate with an interval scalar")]
    Inexact(&'static str),

    #[error("malformed word {0:?}")]
    MalformedWord(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("requested tolerance {requested:e} unreachable: best bracket width {achieved:e}")]
    ToleranceUnreachable { requested: f64, achieved: f64 },

    #[error("|g| = {norm} exceeds the guarded radius {limit}")]
    OutsideGuard { norm: f64, limit: f64 },

    #[error("not certified: {0}")]
    NotCertified(String),

    #[error("net gives no positive linear lower bound (slope {0})")]
    DegenerateNet(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
}
