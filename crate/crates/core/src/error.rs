use thiserror::Error;

/// Errors raised by the numerical routines and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficients violate Hermitian symmetry at k={k}: relative defect {defect:.3e}")]
    SymmetryViolation { k: i64, defect: f64 },

    #[error("non-finite coefficient at k={k}")]
    NonFinite { k: i64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("function must have mean zero (mean = {mean:.3e}); apply a Galilei boost first")]
    NonZeroMean { mean: f64 },

    #[error("Hilbert-Schmidt norm {hs:.6} is not below {limit}")]
    HsNormTooLarge { hs: f64, limit: f64 },

    #[error("eigenvalue {lambda:.12} is too close to 1")]
    EigenvalueTooLarge { lambda: f64 },

    #[error("trace has imaginary part {imag:.3e} against real part {real:.3e}")]
    NonRealTrace { real: f64, imag: f64 },

    #[error("operator mismatch: {0}")]
    OperatorMismatch(String),

    #[error("no kappa below {limit:e} brings the operator below the requested bound")]
    ThresholdNotFound { limit: f64 },

    #[error("solver blowup at t={time}: {reason}")]
    Blowup { time: f64, reason: String },

    #[error("spectral tail fraction {fraction:.3e} exceeds {limit:.1e} at t={time}")]
    TailMonitor { time: f64, fraction: f64, limit: f64 },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed coefficient file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailed(_) => 1,
            Error::Blowup { .. } | Error::TailMonitor { .. } => 2,
            Error::Precondition(_)
            | Error::HsNormTooLarge { .. }
            | Error::EigenvalueTooLarge { .. }
            | Error::NonZeroMean { .. }
            | Error::ThresholdNotFound { .. } => 3,
            Error::Config(_) | Error::Json(_) | Error::Format(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
