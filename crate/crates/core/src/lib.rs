//! Two image-encryption schemes proposed for privacy-preserving deep learning,
//! and the chosen-plaintext and ciphertext-only attacks that break them.
//!
//! * [`tanaka`]: keyed block scrambling. Every `M×M` block has its `3M²`
//!   colour components permuted and optionally reversed the same way.
//! * [`skk`]: per-pixel negative-positive transformation plus an optional
//!   per-pixel channel shuffle.
//! * [`attacks`]: full chosen-plaintext recovery for both schemes (driven
//!   through an [`oracle::EncryptionOracle`]) and two partial ciphertext-only
//!   attacks on the per-pixel scheme.
//! * [`metrics`]: exactness, PSNR and gradient energy used to score attacks.

pub mod attacks;
pub mod corpus;
mod error;
pub mod image;
pub mod keystream;
pub mod metrics;
pub mod oracle;
pub mod skk;
pub mod tanaka;

pub use error::{Error, Result};
pub use image::{Image, Pixel};
pub use keystream::SecretKey;
