use thiserror::Error;

/// Failures shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument outside validated range: {0}")]
    Range(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:?}, error bound {error_bound:e})"
    )]
    Convergence {
        estimate: Vec<f64>,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("not a valid Pauli channel: {0}")]
    NotAChannel(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("no crossing found: {0}")]
    NotFound(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the quadrature engine rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {x}")))
    }
}
