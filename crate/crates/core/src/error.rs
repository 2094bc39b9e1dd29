use thiserror::Error;

/// Errors raised by the library. Protocol-level failures of a prover are not
/// errors: they surface as [`crate::protocol::Outcome::Reject`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a supported prime (need an odd prime 3 <= p < 2^62)")]
    BadModulus(u64),

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bad shift: the shifted system is inconsistent with the right-hand side")]
    BadShift,

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("dense oracle cap exceeded: n = {n} > cap = {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("field too small for {protocol}: requires p >= {required}, got p = {p}")]
    FieldTooSmall {
        protocol: &'static str,
        required: u64,
        p: u64,
    },

    #[error("matrix digest mismatch: transcript was produced for a different matrix")]
    DigestMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
