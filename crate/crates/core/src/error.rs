use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("joint dimension {dimension} exceeds cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("logarithm branch ambiguity: eigenphase {phase:.12} is within 1e-6 of pi")]
    BranchAmbiguity { phase: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("group error: {0}")]
    Group(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("divided control violated in segment {segment}: qubits {qubits:?} carry single- and multi-qubit terms")]
    DividedControl { segment: usize, qubits: Vec<usize> },
    #[error("layer commutation check failed: {0}")]
    LayerCommutation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
