use thiserror::Error;

/// Errors raised by the speed-limit toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("operator is not Hermitian (max deviation {max_deviation:e})")]
    NonHermitian { max_deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no eigenvalue has occupation above tolerance {tol:e}")]
    NoOccupation { tol: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("time average over a zero-length interval")]
    DegenerateInterval,

    #[error("integration step too large: norm drift {drift:e} in one step")]
    StepTooLarge { drift: f64 },

    #[error("fidelity {delta} not reached within t_max = {t_max}")]
    NotReached { delta: f64, t_max: f64 },

    #[error("state occupies {found} distinct energy levels, at least 3 required")]
    InsufficientLevels { found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl QslError {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            QslError::NonHermitian { .. } => "NonHermitian",
            QslError::DimensionMismatch { .. } => "DimensionMismatch",
            QslError::NoOccupation { .. } => "NoOccupation",
            QslError::DomainError(_) => "DomainError",
            QslError::DegenerateInterval => "DegenerateInterval",
            QslError::StepTooLarge { .. } => "StepTooLarge",
            QslError::NotReached { .. } => "NotReached",
            QslError::InsufficientLevels { .. } => "InsufficientLevels",
            QslError::InvalidState(_) => "InvalidState",
        }
    }

    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            QslError::NoOccupation { .. }
                | QslError::DegenerateInterval
                | QslError::StepTooLarge { .. }
                | QslError::NotReached { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, QslError>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(QslError::DimensionMismatch { expected, found })
    }
}
