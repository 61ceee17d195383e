//! Crate-wide error type.

/// Errors produced by the numerical and simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge (partial estimate {partial:.9e}, error estimate {error_estimate:.3e})")]
    QuadratureNonConvergence { partial: f64, error_estimate: f64 },

    /// An iterative solver or fit failed to converge.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// Moment pair without a Jensen gap; a log-normal cannot be matched.
    #[error("no Jensen gap: m2 = {m2:.9e} <= m1^2 = {m1_sq:.9e}")]
    NoJensenGap { m2: f64, m1_sq: f64 },

    /// Not enough history samples for a windowed estimate.
    #[error("insufficient history: have {have} samples, need {need}")]
    InsufficientHistory { have: usize, need: usize },

    /// A configuration file failed to parse or violated an invariant.
    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: msg.into(),
        }
    }
}
