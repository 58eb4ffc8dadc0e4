use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the admissible range of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A kernel was evaluated at its singular point.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The requested route is not defined for these parameters (e.g. spatial
    /// kernel split at beta = 0).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The computational box cannot hold the kernel support.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The spectral output carried a non-negligible imaginary part.
    #[error("Fourier convention violation: {0}")]
    Convention(String),

    /// The decomposition level lies below the average of |f| over the box.
    #[error("level too small: {0}")]
    LevelTooSmall(String),

    /// Invalid user input (unknown field kind, malformed configuration).
    #[error("usage error: {0}")]
    Usage(String),

    /// A serialized field could not be decoded.
    #[error("format error: {0}")]
    Format(String),

    /// A computed quantity broke an invariant it must satisfy.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 for bad input or configuration, 3 for a
    /// numerical invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singularity(_) | Error::Convention(_) | Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
