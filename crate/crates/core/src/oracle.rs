//! Chosen-plaintext oracles.
//!
//! An oracle holds its key privately and answers encryption queries. The
//! attacks are written against [`EncryptionOracle`] and never see a key.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::Result;
use crate::image::Image;
use crate::skk::{skk_encrypt, SkkKey};
use crate::tanaka::{tanaka_encrypt, TanakaKey};

pub trait EncryptionOracle: Send + Sync {
    /// Encrypts `plaintext`. Failed queries are not counted.
    fn query(&self, plaintext: &Image) -> Result<Image>;

    /// Number of successful queries so far.
    fn query_count(&self) -> u64;
}

/// Same-key oracle for the block-scrambling scheme.
#[derive(Debug)]
pub struct TanakaOracle {
    key: TanakaKey,
    queries: AtomicU64,
}

pub fn tanaka_oracle(key: TanakaKey) -> TanakaOracle {
    TanakaOracle {
        key,
        queries: AtomicU64::new(0),
    }
}

impl EncryptionOracle for TanakaOracle {
    fn query(&self, plaintext: &Image) -> Result<Image> {
        let ct = tanaka_encrypt(plaintext, &self.key)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(ct)
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Same-key oracle for the per-pixel scheme.
#[derive(Debug)]
pub struct SkkOracle {
    key: SkkKey,
    queries: AtomicU64,
}

pub fn skk_oracle(key: SkkKey) -> SkkOracle {
    SkkOracle {
        key,
        queries: AtomicU64::new(0),
    }
}

impl EncryptionOracle for SkkOracle {
    fn query(&self, plaintext: &Image) -> Result<Image> {
        let ct = skk_encrypt(plaintext, &self.key)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(ct)
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}
