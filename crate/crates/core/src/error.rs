use thiserror::Error;

pub type Result<T> = std::result::Result<T, MhdError>;

#[derive(Debug, Error)]
pub enum MhdError {
    #[error("invalid grade {0}")]
    InvalidGrade(i32),

    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: String, found: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operand has a component in the operator kernel (relative size {0:.3e})")]
    KernelObstruction(f64),

    #[error("initial data outside the required subspace (relative defect {0:.3e})")]
    SubspaceViolation(f64),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("Picard iteration diverged after {iterations} iterations (residuals {residuals:?}, iterate norms {norms:?})")]
    Divergence {
        iterations: usize,
        residuals: Vec<f64>,
        norms: Vec<f64>,
    },

    #[error("reference integrator unstable at t = {t}: norm {norm:.3e} exceeds {limit:.3e}")]
    Unstable { t: f64, norm: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
