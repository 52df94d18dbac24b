use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination has no closed form (a quadrature path may
    /// exist instead).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Rejection sampling gave up after the configured number of attempts.
    #[error(
        "rejection sampling exhausted {attempts} attempts \
         (empirical acceptance rate {acceptance_rate:.3e})"
    )]
    AttemptsExhausted { attempts: u64, acceptance_rate: f64 },

    /// A sampling loop exceeded its hard draw cap.
    #[error("draw cap of {cap} exceeded")]
    DrawCapExceeded { cap: u64 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature reached relative error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },

    /// A statistical test was given too few observations.
    #[error("insufficient sample: need at least {required}, got {actual}")]
    InsufficientSample { required: usize, actual: usize },

    /// A point measure holds fewer atoms than the operation needs.
    #[error("insufficient atoms: need {required}, measure has {actual}")]
    InsufficientAtoms { required: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
