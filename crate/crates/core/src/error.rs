use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate mesh: cell {cell}, face {face} has orthogonal distance {distance:e}")]
    DegenerateCell { cell: usize, face: usize, distance: f64 },

    #[error("point ({x}, {y}) lies outside the unit square")]
    PointOutside { x: f64, y: f64 },

    #[error("mesh fingerprint mismatch: expected {expected:016x}, found {found:016x}")]
    FingerprintMismatch { expected: u64, found: u64 },

    #[error("diffusion coefficient {value:e} is not positive at ({x}, {y})")]
    NonPositiveDiffusion { value: f64, x: f64, y: f64 },

    #[error("parameter vector has {found} components, problem `{problem}` expects {expected}")]
    ParameterDimension {
        problem: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose by {diff:e}")]
    Asymmetric { row: usize, col: usize, diff: f64 },

    #[error("non-positive diagonal entry {value:e} in row {row}")]
    NonPositiveDiagonal { row: usize, value: f64 },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    EigenNotConverged { sweeps: usize, off: f64 },

    #[error("all snapshots were dropped as linearly dependent")]
    DegenerateTrainingSet,

    #[error("reference field has zero norm")]
    ZeroReference,

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("solve failed for n = {n}, mu = {mu:?}: {source}")]
    Solve {
        n: usize,
        mu: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::DegenerateCell { .. }
            | Error::NonPositiveDiffusion { .. }
            | Error::Asymmetric { .. }
            | Error::NonPositiveDiagonal { .. }
            | Error::NotConverged { .. }
            | Error::NotPositiveDefinite
            | Error::EigenNotConverged { .. }
            | Error::DegenerateTrainingSet
            | Error::ZeroReference => true,
            Error::Solve { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
