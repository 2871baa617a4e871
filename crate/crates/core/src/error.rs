use thiserror::Error;

/// Failures reported by the integrators, diagnostics and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("history sample at t = {t} lies outside [{tau}, 0]")]
    Domain { t: f64, tau: f64 },

    #[error("insufficient history: buffer holds {capacity} entries, {required} required")]
    InsufficientHistory { capacity: usize, required: usize },

    #[error("singular step: |denominator| = {denominator:e} is below the threshold")]
    SingularStep { denominator: f64 },

    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("non-finite value at step {step}")]
    Divergence { step: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
