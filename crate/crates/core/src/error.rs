use thiserror::Error;

/// Errors raised by profile construction, evaluation and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("profile domain is empty")]
    DomainEmpty,
    #[error("t = {t} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("value {u} is outside the range of the profile")]
    OutOfRange { u: f64 },
    #[error("profile is not monotone near t = {t}")]
    NotMonotone { t: f64 },
    #[error("profile is not invertible at t = {t} (zero derivative)")]
    NotInvertible { t: f64 },
    #[error("nonpositive value {value} at t = {t}")]
    NotPositive { t: f64, value: f64 },
    #[error("integration failed: {0}")]
    IntegrationError(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("zero complex gradient: the point is singular")]
    SingularPoint,
    #[error("point is not on the hypersurface (defect {defect:e})")]
    NotOnHypersurface { defect: f64 },
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("model is not strongly plurisubharmonic: {0}")]
    NotStronglyPsh(String),
    #[error("wrong parameter regime: {0}")]
    WrongRegime(String),
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("degenerate constants: {0}")]
    DegenerateConstants(String),
    #[error("verification failed ({what}) at {location} with margin {margin:e}")]
    VerificationFailed {
        what: String,
        location: f64,
        margin: f64,
    },
    #[error("mollification radius too large: {0}")]
    RadiusTooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
