use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("zero or negative density in cell {cell} (n = {density:e})")]
    ZeroDensity { cell: usize, density: f64 },

    #[error("equilibrium solve failed in cell {cell}: {source}")]
    Equilibrium {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("matrix is numerically rank deficient (column {column}, |r_jj| = {pivot:e})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("matrix is exactly singular (pivot column {0})")]
    Singular(usize),

    #[error("operator dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("malformed snapshot {path:?}: {msg}")]
    Snapshot { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Distinguishes caller mistakes from solver failures. The CLI maps
    /// the former to exit code 2 and the latter to 3.
    pub fn is_argument_error(&self) -> bool {
        matches!(
            self,
            Error::Argument(_)
                | Error::Config { .. }
                | Error::GridMismatch(_)
                | Error::DimensionCap { .. }
                | Error::Snapshot { .. }
                | Error::Io(_)
        )
    }

    /// Residual history attached to a convergence failure, if any.
    pub fn history(&self) -> Option<&[f64]> {
        match self {
            Error::Convergence { history, .. } => Some(history),
            Error::Equilibrium { source, .. } => source.history(),
            _ => None,
        }
    }
}
