use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("{requested} qubits exceeds the dense-simulation cap of {cap}")]
    QubitCap { requested: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed circuit: {0}")]
    Circuit(String),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("ancilla preparation failed after {retries} retries")]
    PreparationFailed { retries: usize },
    #[error("noise rate {eps} is not below threshold {eps0}")]
    AboveThreshold { eps: f64, eps0: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
