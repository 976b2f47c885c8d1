use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlspError {
    #[error("numerical corruption: {0}")]
    NumericalCorruption(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular time t = {t}: {reason}")]
    SingularTime { t: f64, reason: String },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("boundary mass {fraction:.3e} exceeds {limit:.1e}")]
    BoundaryMass { fraction: f64, limit: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NlspError {
    fn from(e: std::io::Error) -> Self {
        NlspError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NlspError>;
