use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Numerical routines reject inputs that violate their mathematical
/// preconditions (non-Hermitian where Hermitian is required, singular where
/// invertible is required, and so on) instead of silently producing garbage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix not Hermitian within tolerance (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state not faithful (eigenvalue {eigenvalue:.3e} below cutoff)")]
    NotFaithful { eigenvalue: f64 },

    #[error("operator is singular: {0}")]
    Singular(String),

    #[error("grading unitary is not an involution (deviation {deviation:.3e})")]
    BadGrading { deviation: f64 },

    #[error("map is not even (grading-intertwining residual {residual:.3e})")]
    NotEven { residual: f64 },

    #[error("map is not unital (residual {residual:.3e})")]
    NotUnital { residual: f64 },

    #[error("state compatibility violated (residual {residual:.3e})")]
    StateMismatch { residual: f64 },

    #[error("map is not completely positive (Choi defect {defect:.3e})")]
    NotCompletelyPositive { defect: f64 },

    #[error("not a transport plan: {0}")]
    NotAPlan(String),

    #[error("invariance violated for dynamics '{name}' (residual {residual:.3e})")]
    NotInvariant { name: String, residual: f64 },

    #[error("copying map invalid: {0}")]
    BadCopyingMap(String),

    #[error("system is not reversible: {0}")]
    NotReversible(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
