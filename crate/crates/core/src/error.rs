use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The geodesic did not leave the disc within the step budget.
    #[error("geodesic trapped: no exit after {steps} steps")]
    TrappedRay { steps: usize },

    /// `b` vanished away from `t = 0`: a conjugate point lies on the geodesic.
    #[error("Jacobi field b vanishes at t = {t} (conjugate point)")]
    SingularB { t: f64 },

    #[error("reference grid has zero norm")]
    ZeroReference,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
