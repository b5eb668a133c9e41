use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    Dimension(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
