use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole at {0}")]
    Pole(String),
    #[error("precision target not met: {0}")]
    Precision(String),
    #[error("insufficient coefficient data: need index {needed}, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("degree must be 1, got {0}")]
    Degree(f64),
    #[error("asymptotic fit failed: {0}")]
    Fit(String),
    #[error("character is not primitive (conductor {conductor} < modulus {modulus})")]
    NotPrimitive { modulus: u64, conductor: u64 },
    #[error("quadrature budget exceeded: {panels} panels, error estimate {estimate:e}")]
    QuadratureBudgetExceeded { panels: usize, estimate: f64 },
    #[error("no independent oracle for this element")]
    OracleUnavailable,
    #[error("alpha = {alpha} is not a support point (pi C Q^2 alpha = {scaled})")]
    SupportMismatch { alpha: f64, scaled: f64 },
    #[error("conductor mismatch: constants give {from_constants}, peaks give {from_peaks}")]
    ConductorMismatch { from_constants: u64, from_peaks: u64 },
    #[error("no character matches the coefficient table (best deviation {best_deviation:.3})")]
    NoMatch { best_deviation: f64 },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "PoleError",
            Error::Precision(_) => "PrecisionError",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::Degree(_) => "DegreeError",
            Error::Fit(_) => "FitError",
            Error::NotPrimitive { .. } => "NotPrimitive",
            Error::QuadratureBudgetExceeded { .. } => "QuadratureBudgetExceeded",
            Error::OracleUnavailable => "OracleUnavailable",
            Error::SupportMismatch { .. } => "SupportMismatch",
            Error::ConductorMismatch { .. } => "ConductorMismatch",
            Error::NoMatch { .. } => "NoMatch",
            Error::Evaluation(_) => "EvaluationError",
            Error::Invalid(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
