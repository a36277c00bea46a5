//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain an operation is defined on.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The modulus does not have one of the four supported factor shapes.
    #[error("unsupported q-shape: {0}")]
    UnsupportedShape(String),

    /// A residue set failed validation; the message names the offending
    /// residue and the violated invariant.
    #[error("invalid residue set: {0}")]
    InvalidSet(String),

    /// Evaluation point too close to a pole of the generating function.
    #[error("evaluation point {0} is too close to a pole")]
    PoleProximity(String),

    /// Brute-force enumeration cap exceeded.
    #[error("set of size {0} exceeds the brute-force enumeration cap of {1}")]
    BruteForceCap(usize, usize),

    /// Checkpoint cache rejected (version, parameter, or content mismatch).
    #[error("checkpoint cache rejected: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
