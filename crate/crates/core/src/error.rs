use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero spin has no direction: normalized spin operators are undefined for S = 0")]
    ZeroSpinHasNoDirection,

    #[error("positivity violation: {family} requires {param} in [{lo}, {hi}], got {value}")]
    PositivityViolation { family: &'static str, param: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("negative Q function value {0:e}: input matrix is not positive")]
    NegativeQValue(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not one (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("spherical-harmonic degree {0} exceeds the supported maximum of {max}", max = crate::sphere::MAX_HARMONIC_DEGREE)]
    DegreeTooHigh(usize),

    #[error(
        "ensemble mixture does not reproduce the target state (residual {residual:e}); grid degree {degree} is too low"
    )]
    EnsembleMismatch { residual: f64, degree: usize },

    #[error("alpha = {alpha} is outside the simulable range |alpha| <= {bound} for S = {spin}; raise S")]
    OutsideSimulableRange { alpha: f64, bound: f64, spin: f64 },

    #[error("alpha = {0} lies outside the Werner range [-1, 1/3]")]
    AlphaOutOfRange(f64),

    #[error("invalid range [{lo}, {hi}] with step {step}: {reason}")]
    InvalidRange { lo: f64, hi: f64, step: f64, reason: &'static str },

    #[error("state is separable (effective entanglement is zero); resources are trivially finite")]
    SeparableLimit,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
