use thiserror::Error;

/// Errors raised by the numeric layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    /// A model or Meijer-G parameter set violates its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No evaluation strategy converges for this Meijer-G instance.
    #[error("unsupported Meijer-G instance: {0}")]
    UnsupportedInstance(String),

    /// Adaptive quadrature failed to reach its tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {abs_err:e} after {evals} evaluations ({reason})"
    )]
    Quadrature {
        reason: &'static str,
        estimate: f64,
        abs_err: f64,
        evals: usize,
    },

    /// The configuration does not match the requested closed form.
    #[error("scheme mismatch: {0}")]
    SchemeMismatch(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T: crate::Real>(what: &'static str, value: T) -> Error {
    Error::Domain {
        what,
        value: value.as_f64(),
    }
}
