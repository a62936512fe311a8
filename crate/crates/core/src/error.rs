use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("{0} qubits requested; at most {max} are supported", max = crate::quantum::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("expected a {expected}-qubit state, got {actual} qubits")]
    WrongDimension { expected: usize, actual: usize },
    #[error("partial trace must keep at least one qubit")]
    EmptyKeep,
    #[error("{name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
