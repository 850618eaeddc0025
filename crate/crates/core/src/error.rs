use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("graph is disconnected: vertex {vertex} unreachable from {from}")]
    Disconnected { from: usize, vertex: usize },

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("signal has zero norm")]
    ZeroSignal,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    #[error("dimension {n} exceeds dense threshold {threshold}; use the iterative solver")]
    TooLargeForDense { n: usize, threshold: usize },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("not enough points: need {need}, have {have}")]
    InsufficientPoints { need: usize, have: usize },

    #[error("distance distribution did not converge within {0} shells")]
    TailNotConverged(usize),

    #[error("nothing to render: {0}")]
    EmptyDocument(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::TailNotConverged(_))
    }
}
