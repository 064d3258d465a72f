use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} = {value} lies outside the domain: {reason}")]
    Domain { quantity: &'static str, value: f64, reason: String },

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate}, residual {residual}")]
    Quadrature { lo: f64, hi: f64, estimate: f64, residual: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("linear system is rank deficient ({unknowns} unknowns, {equations} equations); use a positive regularization weight")]
    RankDeficient { unknowns: usize, equations: usize },

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("failed to parse line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

pub(crate) fn domain(quantity: &'static str, value: f64, reason: impl Into<String>) -> Error {
    Error::Domain { quantity, value, reason: reason.into() }
}
