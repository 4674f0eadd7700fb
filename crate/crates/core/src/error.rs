use thiserror::Error;

/// Errors raised anywhere in the analytic or simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    /// A series, continued fraction or quadrature did not converge.
    #[error("{func}: no convergence after {iterations} iterations")]
    Convergence {
        func: &'static str,
        iterations: usize,
    },

    /// A moment or integral is infinite for the requested parameters.
    #[error("divergent moment: {0}")]
    Divergence(String),

    /// A numerically computed quantity is unusable (e.g. a non-positive variance).
    #[error("computation failed: {0}")]
    Computation(String),

    /// Invalid scenario or model configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A request that would exhaust memory.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
