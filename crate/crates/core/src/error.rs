use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("virtual-state denominator |omega43 + delta| = {value:e} rad/s is below {epsilon:e}")]
    DegenerateDenominator { value: f64, epsilon: f64 },

    #[error("stability guard violated: dt * max_rate = {product:.3e} (must be < {limit})")]
    StabilityGuard { product: f64, limit: f64 },

    #[error("density-matrix invariant violated at t = {time:e} s: {detail}")]
    InvariantViolation { time: f64, detail: String },

    #[error("numerical instability at t = {time:e} s: {detail}")]
    Instability { time: f64, detail: String },

    #[error("grid resolution: {0}")]
    GridResolution(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid coverage: {0}")]
    GridCoverage(String),

    #[error("empty retrieval window: {0}")]
    EmptyWindow(String),

    #[error("invalid Stokes vector: {0}")]
    InvalidStokes(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("table parse error on line {line}: {reason}")]
    TableParse { line: usize, reason: String },

    #[error("at laser detuning {delta_hz:e} Hz: {source}")]
    AtDetuning { delta_hz: f64, source: Box<Error> },
}

impl Error {
    /// Innermost error, skipping detuning annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtDetuning { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
