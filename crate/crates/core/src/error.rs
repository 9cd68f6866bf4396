use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QoscError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor of a closed-form kernel vanishes.
    #[error("kernel singular at {location}: |factor| = {magnitude:e}")]
    Singular { location: String, magnitude: f64 },

    /// The principal-value poles reach the interval ends (x near 0).
    #[error("degenerate pole geometry at x = {x}: {reason}")]
    DegenerateGeometry { x: f64, reason: String },

    /// A numerical procedure failed to converge or produced an inconsistent estimate.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, QoscError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QoscError::Domain(msg.into()))
}
