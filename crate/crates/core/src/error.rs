use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed PPM at byte offset {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("unsupported bit depth {0}")]
    UnsupportedBitDepth(u8),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image of {width}x{height} is not divisible into {block}x{block} blocks")]
    Dimension {
        width: usize,
        height: usize,
        block: usize,
    },

    #[error("image mismatch: {0}")]
    Mismatch(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid key: {0}")]
    Key(String),

    #[error("oracle responses are inconsistent: {0}")]
    InconsistentOracle(String),
}
