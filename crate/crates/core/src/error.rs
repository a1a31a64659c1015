use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate anchors: singular-value ratio {ratio:e} below rank tolerance")]
    DegenerateAnchors { ratio: f64 },

    #[error("measure mismatch: {0}")]
    MeasureMismatch(String),

    #[error("not a frame: lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e}")]
    SingularFrame { lambda_min: f64, lambda_max: f64 },

    #[error("singular operator: smallest/largest singular value ratio {ratio:e}")]
    SingularOperator { ratio: f64 },

    #[error("not a dual pair: reconstruction residual {residual:e} exceeds {tolerance:e}")]
    NotADual { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, FrameError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(FrameError::DimensionMismatch { expected, found })
    }
}
