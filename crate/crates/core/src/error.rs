use thiserror::Error;

use crate::quantum::QubitLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("no root of the phase condition in [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("unknown qubit label {0}")]
    UnknownLabel(QubitLabel),

    #[error("duplicate qubit label {0}")]
    DuplicateLabel(QubitLabel),

    #[error("label sets of the two states differ")]
    LabelMismatch,

    #[error("register of {qubits} qubits exceeds the dense limit of {max}")]
    TooLarge { qubits: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid Pauli channel (x={x}, y={y}, z={z})")]
    InvalidChannel { x: f64, y: f64, z: f64 },

    #[error("code distance must be at least 2, got {0}")]
    InvalidDistance(usize),

    #[error("stabilizer has weight {actual}, expected {expected}")]
    WeightMismatch { expected: usize, actual: usize },

    #[error("stabilizer support qubit {0} is not in the state")]
    UnknownSupport(QubitLabel),

    #[error("no stabilizer matches the requested selection")]
    NoSuchStabilizer,

    #[error("swapped protocol needs 3 or 4 spin qubits, got {0}")]
    BadRegisterSize(usize),

    #[error("interaction model is invalid: {0}")]
    InvalidModel(String),

    #[error("readout has zero probability (denominator {denominator:e})")]
    ZeroProbabilityReadout { denominator: f64 },

    #[error("fidelity is indeterminate: both systems are conditionality-free")]
    Indeterminate,

    #[error("heralding event never occurs")]
    NoHerald,

    #[error("invalid time arguments (t={t}, T2={t2}, n={n})")]
    InvalidTime { t: f64, t2: f64, n: u32 },
}
