use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Debug, Error)]
pub enum Error {
    /// Unsupported or malformed root-system label, or a group too large to enumerate.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller handed us something outside an operation's domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// Exact division left a nonzero remainder.
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: LaurentPoly },

    #[error("singular matrix at column {0}")]
    Singular(usize),

    /// The requested word is longer than the configured convolution cap.
    #[error("word length {len} exceeds the length cap {cap}")]
    LengthCap { len: usize, cap: usize },

    /// An identity that must hold by construction failed. Always a bug.
    #[error("integrity failure: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
