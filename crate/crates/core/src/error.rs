use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid system parameters: {0}")]
    InvalidSystem(String),

    #[error("invalid integrator options: {0}")]
    InvalidOptions(String),

    #[error("initial state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("integration did not converge: norm drift {drift:.3e} exceeds tolerance {tolerance:.3e} at t = {t} (dt = {dt})")]
    NonConvergent { drift: f64, tolerance: f64, t: f64, dt: f64 },

    #[error("eigensystem requested for a damped (non-Hermitian) sample")]
    DampedEigensystem,

    #[error("adiabatic tracking is ambiguous at t = {t}; reduce the sample spacing")]
    AmbiguousTracking { t: f64 },

    #[error("invalid pass: {0}")]
    InvalidPass(String),

    #[error("basis state {label} would require two or more photons")]
    ExcitationOverflow { label: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid subsystem selector: {0}")]
    InvalidSelector(String),

    #[error("non-physical density matrix: {0}")]
    NonPhysical(String),
}
