use thiserror::Error;

use crate::exprlang::EvalError;
use crate::jets::JetError;
use crate::tensor::TensorError;

/// Failures while evaluating geometry at a parameter point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate induced metric (det g = {det:e}, metric scale {scale:e})")]
    DegenerateMetric { det: f64, scale: f64 },
    #[error("normal frame construction failed at step {step}: only null candidates remain")]
    FrameConstruction { step: usize },
    #[error("density vanishes (rho = {value:e})")]
    ZeroDensity { value: f64 },
    #[error("image of the Z map has rank {found}, expected {expected}")]
    RankDeficiency { found: usize, expected: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
