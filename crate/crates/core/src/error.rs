//! Error type shared by every module in the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error for basis construction, model building, solving and studies.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller supplied an argument outside its documented domain
    /// (site index out of range, n_up > n_sites, bond on identical sites, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two objects that must describe the same system do not
    /// (basis built for a different site count, vector of wrong length, ...).
    #[error("inconsistent state: {0}")]
    State(String),

    /// A configuration file or run description failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A request is well formed but exceeds a hard resource cap
    /// (sector too large for the dense path, too many sites, ...).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The iterative eigensolver could not certify the requested accuracy.
    #[error("eigensolver failed to converge: {msg} (best residual {best_residual:.3e})")]
    Convergence { msg: String, best_residual: f64 },

    /// Disorder sampling could not produce an admissible sample.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// An I/O or serialization problem while reading or writing run artifacts.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(format!("json: {e}"))
    }
}

impl Error {
    /// Shorthand used by argument validation.
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Shorthand used by cross-object consistency checks.
    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }
}
