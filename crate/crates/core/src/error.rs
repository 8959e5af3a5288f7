use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate graph: node {node} has no neighbours")]
    IsolatedNode { node: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("consensus value did not settle: residual {residual:e} exceeds {tolerance:e}")]
    NotSettled { residual: f64, tolerance: f64 },

    #[error("a certificate was found at the upper bracket tau_hi = {tau_hi}; widen the bracket")]
    WidenBracket { tau_hi: f64 },

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
