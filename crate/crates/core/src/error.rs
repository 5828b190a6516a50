use thiserror::Error;

/// Errors raised by the sensing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("length mismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// Every reported energy was zero, so no weights can be formed.
    #[error("no signal information: all reported energies are zero")]
    NoSignal,

    #[error("numeric overflow in {op}")]
    Overflow { op: &'static str },

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate}")]
    QuadratureNotConverged { estimate: f64, error_estimate: f64 },

    #[error("series in {op} did not converge after {terms} terms")]
    SeriesNotConverged { op: &'static str, terms: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(op: &'static str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        op,
        msg: msg.into(),
    })
}
