use thiserror::Error;

/// Process exit code for configuration errors.
pub const EXIT_CONFIG: u8 = 2;
/// Process exit code for integrator failures.
pub const EXIT_INTEGRATOR: u8 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("integrator failure: {0}")]
    Integrator(scrap_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<scrap_core::Error> for RunError {
    fn from(e: scrap_core::Error) -> Self {
        match e {
            scrap_core::Error::NonConvergent { .. } | scrap_core::Error::AmbiguousTracking { .. } => {
                RunError::Integrator(e)
            }
            other => RunError::Config(other.to_string()),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Integrator(_) => EXIT_INTEGRATOR,
            RunError::Io(_) => 1,
        }
    }
}
