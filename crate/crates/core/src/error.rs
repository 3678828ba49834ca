use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("truncation degree {m} too small: tail {tail:e} above target {target:e}")]
    Truncation { m: usize, tail: f64, target: f64 },
    #[error("matrix singular or ill-conditioned (estimated 1-norm condition {cond:e})")]
    Singular { cond: f64 },
    #[error("Hankel product is not a contraction: estimated norm {0}")]
    NonContraction(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Pole(_) | Error::Domain(_) | Error::Dimension { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
