use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M - M^H| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Fock dimension must be at least 2, got {0}")]
    FockTooSmall(usize),

    #[error("Fock level {n} out of range for dimension {dim}")]
    FockOutOfRange { n: usize, dim: usize },

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("harmonicity violated: omega = {omega} < |4 phi| = {four_phi}")]
    Harmonicity { omega: f64, four_phi: f64 },

    #[error("truncation risk: top-level population {population:e} exceeds {threshold:e}")]
    TruncationRisk { population: f64, threshold: f64 },

    #[error("non-positive quadrature variance ({0:e})")]
    NonPositiveVariance(f64),

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
