use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("unsupported qubit count {n}: must be in 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("operator is not Hermitian: phase exponent {phase_exp} is an odd power of i")]
    NonHermitianPhase { phase_exp: u8 },

    #[error("cannot parse Pauli string {input:?}: {reason}")]
    PauliParse { input: String, reason: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("channel is not completely positive: minimum Choi eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid stabilizer code: {0}")]
    InvalidCode(String),

    #[error("syndrome mismatch: operator has syndrome {found}, expected {expected}")]
    SyndromeMismatch { expected: String, found: String },

    #[error("incomplete syndrome set: got {got}, expected {expected} distinct syndromes")]
    IncompleteSyndromeSet { got: usize, expected: usize },

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
