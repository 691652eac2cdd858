use thiserror::Error;

use crate::code::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid Pauli character {found:?} at position {position}")]
    InvalidPauliChar { position: usize, found: char },

    #[error("empty Pauli string")]
    EmptyPauli,

    #[error("invalid syndrome character {found:?} at position {position}")]
    InvalidSyndromeChar { position: usize, found: char },

    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("block ({layer}, {block}) out of range")]
    BlockOutOfRange { layer: usize, block: usize },

    #[error("syndrome {syndrome} has zero probability under the prior")]
    ImpossibleSyndrome { syndrome: String },

    #[error("no pure error satisfies constraint: {0}")]
    NoPureError(String),

    #[error("invalid stabilizer code: {}", format_violations(.0))]
    InvalidCode(Vec<Violation>),

    #[error("unsupported block length {0} (expected 2..={max})", max = crate::code::MAX_BLOCK_LEN)]
    UnsupportedBlockLength(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
