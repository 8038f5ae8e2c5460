use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input falls outside the set an operation is defined on
    /// (for example, a matrix that is not doubly stochastic).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sinkhorn balancing did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("{axis} {index} sums to zero; cannot rescale")]
    ZeroLine { axis: &'static str, index: usize },

    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    /// The precondition of a conditional theorem does not hold for this input.
    /// This is a statement about the input, not a defect.
    #[error("theorem hypothesis not satisfied: {0}")]
    HypothesisFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
