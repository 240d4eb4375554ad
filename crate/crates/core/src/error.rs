use thiserror::Error;

/// Errors raised by the library. All of them are usage errors: bad
/// parameters, malformed input, or requests above a feasibility cap.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground size {0} outside 1..=64")]
    GroundSize(usize),

    #[error("element {element} outside [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("mask {mask:#x} has bits beyond n = {n}")]
    MaskOutOfRange { mask: u64, n: usize },

    #[error("ground sizes differ: {0} vs {1}")]
    GroundMismatch(usize, usize),

    #[error("duplicate member {0}")]
    DuplicateMember(String),

    #[error("restriction repeats coordinate {0}")]
    DuplicateCoordinate(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("family is empty")]
    EmptyFamily,

    #[error("family has diameter {diameter} > s = {s}")]
    DiameterTooLarge { diameter: u32, s: u32 },

    #[error("request exceeds cap: {0}")]
    CapExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
