use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order alpha = {0} must lie in the open interval (1, 2)")]
    InvalidOrder(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("tridiagonal solve hit a vanishing pivot at row {row} (pivot = {pivot:e})")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("fixed-point iteration did not converge at step {step} after {iterations} sweeps (last gap {gap:e})")]
    FixedPointDiverged { step: usize, iterations: usize, gap: f64 },

    #[error("unknown manufactured case {0}; expected 1, 2 or 3")]
    UnknownCase(u32),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
