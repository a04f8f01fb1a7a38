use thiserror::Error;

/// Errors reported by the toolkit.
///
/// Numerical routines return `SolverFailure` with enough context to identify
/// the offending system; contract violations (wrong mesh, bad arguments,
/// inadmissible coefficients) are reported before any expensive work starts.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A coefficient left its admissible range (e.g. sigma <= 0 at a
    /// quadrature point).
    #[error("coefficient out of range: {0}")]
    CoefficientRange(String),

    /// Two objects built on different meshes or spaces were combined.
    #[error("mesh/space mismatch: {0}")]
    ShapeMismatch(String),

    /// A linear solve failed (non-SPD system, NaN in the factorization, or
    /// residual above tolerance).
    #[error("linear solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
