use thiserror::Error;

/// Errors raised by curve construction, geometry, the time stepper and the
/// diagnostics pipeline.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The radius of curvature carries first-harmonic content, so the curve
    /// does not close up.
    #[error("closure violation: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ClosureViolation { residual: f64, tolerance: f64 },

    /// Some sample of rho fell to or below the positivity floor.
    #[error("convexity violation: rho[{index}] = {value:.3e} at theta = {theta:.6}, t = {t:.6}")]
    ConvexityViolation {
        index: usize,
        theta: f64,
        t: f64,
        value: f64,
    },

    #[error("numerical blow-up: non-finite value at t = {t:.6}")]
    NumericalBlowup { t: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl FlowError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        FlowError::InvalidArgument(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        FlowError::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for FlowError {
    fn from(e: std::io::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for FlowError {
    fn from(e: serde_json::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

impl From<csv::Error> for FlowError {
    fn from(e: csv::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FlowError>;
