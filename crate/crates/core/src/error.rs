use thiserror::Error;

/// Errors raised by the solver crate.
///
/// Contract violations (bad dimensions, dependent rows where independence is
/// required) are reported as errors rather than panics so that the CLI can
/// surface them. Resource exhaustion is distinct from every decided verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("rows of the matrix are linearly dependent")]
    DependentRows,
    #[error("point is not feasible")]
    InfeasiblePoint,
    #[error("not a vertex cover: edge {0}-{1} has no endpoint in the cover")]
    NotACover(usize, usize),
    #[error("resource exhausted: {what} exceeded limit {limit}")]
    ResourceExhausted { what: &'static str, limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
