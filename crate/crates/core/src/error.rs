use thiserror::Error;

/// Errors raised by the model, the projections and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("infeasible base point for the moving ball: f(x) = {value:e}")]
    InfeasibleBasePoint { value: f64 },

    #[error("starting point is infeasible: f(x1) = {value:e}")]
    InfeasibleStart { value: f64 },

    #[error("line search failed after {backtracks} backtracks")]
    LineSearchFailed { backtracks: usize },

    #[error("degenerate direction: |d| = {d_norm:e} while |x - y| = {e_n:e}")]
    DegenerateDirection { d_norm: f64, e_n: f64 },

    #[error("ill-conditioned ellipsoid projection: {0}")]
    IllConditioned(String),

    #[error("zero constraint gradient on the boundary")]
    ZeroGradientOnBoundary,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
