use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("operator must be Hermitian")]
    NonHermitian,

    #[error("identity operators are not allowed in a measurement schedule")]
    IdentityMeasurement,

    #[error("forced outcome {requested:+} contradicts the deterministic value")]
    ImpossibleOutcome { requested: i8 },

    #[error("syndrome {0} has no decoding: it is not reachable from any Pauli correction")]
    Undecodable(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
