use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("grid too small along axis {axis}: {extent} samples, stencil needs {required}")]
    GridTooSmall { axis: usize, extent: usize, required: usize },
    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite sample at point {index:?}")]
    NonFinite { index: Vec<usize> },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("metric is not positive definite at point {index:?}")]
    NotPositiveDefinite { index: Vec<usize> },
    #[error("induced metric is not positive definite at point {index:?}")]
    InvalidSurface { index: Vec<usize> },
    #[error("amplitude {amplitude} makes the induced metric degenerate at point {index:?}; use a smaller amplitude")]
    AmplitudeTooLarge { amplitude: f64, index: Vec<usize> },
    #[error("orientation not realizable: {0}")]
    Orientation(String),
    #[error("formula requires CMC: max |H - mean(H)| = {deviation:e} exceeds {tolerance:e}")]
    NotCmc { deviation: f64, tolerance: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency violated at point {index:?}: {detail}")]
    InternalConsistency { index: Vec<usize>, detail: String },
    #[error("solver did not converge after {iterations} iterations, final residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("iterate left the spacelike cone at iteration {iteration}")]
    LeftSpacelikeCone { iteration: usize },
    #[error("singular linear system at row {row}")]
    Singular { row: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
