use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The symbol has negative real part where a decaying kernel is required.
    #[error("domain error: {0}")]
    Domain(String),

    /// A named precondition of an operation does not hold for the given problem.
    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    /// The requested solution has no finite representation in the discrete measure class.
    #[error("representation error: {0}")]
    Representation(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (unresolved jump near t = {jump_time})")]
    Quadrature { lo: f64, hi: f64, jump_time: f64 },

    #[error("grid has {nodes} nodes, above the cap of {cap}")]
    GridCap { nodes: usize, cap: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
