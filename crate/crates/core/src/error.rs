use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every numerical operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An intermediate modulus exceeded [`crate::maps::OVERFLOW_MODULUS`].
    ///
    /// `log_modulus` is the natural log of the modulus that would have been
    /// returned and `phase` is its unit-modulus argument.
    #[error("value escaped to infinity (log|f| = {log_modulus})")]
    EscapedToInfinity { log_modulus: f64, phase: Complex64 },

    #[error("point {point} is not inside {domain}")]
    DomainViolation { domain: String, point: Complex64 },

    #[error("singular-value search incomplete; windows searched: {windows:?}")]
    IncompleteSingularSet { windows: Vec<(f64, f64)> },

    #[error("adaptive quadrature did not converge on [{a}, {b}] within depth {depth}")]
    QuadratureFailure { a: f64, b: f64, depth: u32 },

    #[error("point is not in a tract: {reason}")]
    NotInTract { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(domain: impl std::fmt::Display, point: Complex64) -> Self {
        Error::DomainViolation { domain: domain.to_string(), point }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
