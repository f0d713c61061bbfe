//! Deterministic expansion of a 128-bit secret into the pseudorandom choices
//! both schemes consume.
//!
//! Neither scheme documents how its key drives the pseudorandom decisions,
//! so the expansion is pinned down here. Every output word is
//!
//! ```text
//! word(key, label, index, counter) =
//!     mix(mix(mix(mix(key.lo ^ label) ^ key.hi) ^ index) ^ counter)
//! ```
//!
//! where `mix` is the SplitMix64 step (add the golden-ratio increment, then
//! apply the SplitMix64 finalizer). Each consumer uses its own `label`, so
//! streams for different purposes never overlap. Non-power-of-two ranges
//! are drawn by rejection sampling, which keeps them exactly uniform.
//!
//! The generator is not cryptographically strong. None of the attacks rely
//! on that.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64: increment by the golden gamma, then finalize.
pub const fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const fn label(tag: &[u8; 8]) -> u64 {
    u64::from_le_bytes(*tag)
}

/// Stream labels. One per consumer.
pub mod labels {
    use super::label;

    pub const PIXEL_DECISIONS: u64 = label(b"skk.pixl");
    pub const PERMUTATION: u64 = label(b"perm.fy\0");
    pub const BITMASK: u64 = label(b"mask.bit");
    pub const IMAGE_KEY: u64 = label(b"key.imag");
}

/// 128-bit secret. Any value is valid.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SecretKey(u128);

impl SecretKey {
    pub const fn new(seed: u128) -> Self {
        SecretKey(seed)
    }

    pub const fn seed(self) -> u128 {
        self.0
    }

    const fn lo(self) -> u64 {
        self.0 as u64
    }

    const fn hi(self) -> u64 {
        (self.0 >> 64) as u64
    }

    /// One output word of the keyed generator.
    pub fn word(self, label: u64, index: u64, counter: u64) -> u64 {
        let mut h = mix64(self.lo() ^ label);
        h = mix64(h ^ self.hi());
        h = mix64(h ^ index);
        mix64(h ^ counter)
    }

    pub fn stream(self, label: u64, index: u64) -> KeyStream {
        KeyStream {
            key: self,
            label,
            index,
            counter: 0,
        }
    }

    /// The key file body: 32 lowercase hex characters and a newline.
    pub fn to_key_file(self) -> String {
        format!("{self}\n")
    }

    /// Parses a key file. A single trailing newline is accepted.
    pub fn from_key_file(text: &str) -> Result<Self> {
        let body = text
            .strip_suffix('\n')
            .map(|s| s.strip_suffix('\r').unwrap_or(s))
            .unwrap_or(text);
        body.parse()
    }
}

impl fmt::Display for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

// Keys are secrets; keep them out of debug output.
impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl FromStr for SecretKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 32 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Key(format!(
                "expected 32 hex characters, got {:?}",
                s.chars().take(40).collect::<String>()
            )));
        }
        u128::from_str_radix(s, 16)
            .map(SecretKey)
            .map_err(|e| Error::Key(e.to_string()))
    }
}

/// Counter-mode generator over [`SecretKey::word`] for one `(label, index)`.
#[derive(Debug, Clone)]
pub struct KeyStream {
    key: SecretKey,
    label: u64,
    index: u64,
    counter: u64,
}

impl KeyStream {
    pub fn next_u64(&mut self) -> u64 {
        let w = self.key.word(self.label, self.index, self.counter);
        self.counter += 1;
        w
    }

    /// Uniform integer in `[0, bound)`, by rejection sampling.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Largest multiple of `bound` that fits; reject words at or above it.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let w = self.next_u64();
            if w <= zone {
                return w % bound;
            }
        }
    }
}

/// Per-pixel choices consumed by the per-pixel scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PixelDecisions {
    pub x_r: bool,
    pub x_g: bool,
    pub x_b: bool,
    /// Channel permutation index in `[0, 5]`.
    pub x_s: u8,
}

impl PixelDecisions {
    pub fn flips(self) -> [bool; 3] {
        [self.x_r, self.x_g, self.x_b]
    }
}

/// Decisions for pixel `(u, v)`. They depend only on the key and the
/// position, never on the image, so one key applies the same transform at
/// the same position in every image.
pub fn derive_pixel_decisions(key: SecretKey, u: u32, v: u32) -> PixelDecisions {
    let mut s = key.stream(labels::PIXEL_DECISIONS, (u64::from(v) << 32) | u64::from(u));
    let bits = s.next_u64();
    PixelDecisions {
        x_r: bits & 1 == 1,
        x_g: bits & 2 == 2,
        x_b: bits & 4 == 4,
        x_s: s.below(6) as u8,
    }
}

/// Fisher-Yates permutation of `[0, n)` driven by the keyed stream.
pub fn derive_permutation(key: SecretKey, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = key.stream(labels::PERMUTATION, n as u64);
    for i in (1..n).rev() {
        let j = s.below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

/// `n` keyed bits, 64 per stream word, least significant bit first.
pub fn derive_bitmask(key: SecretKey, n: usize) -> Vec<bool> {
    let mut s = key.stream(labels::BITMASK, 0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = s.next_u64();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|k| (w >> k) & 1 == 1));
    }
    out
}

/// Per-image key `ordinal` derived from a base key.
pub fn derive_image_key(base: SecretKey, ordinal: u64) -> SecretKey {
    let lo = base.word(labels::IMAGE_KEY, ordinal, 0);
    let hi = base.word(labels::IMAGE_KEY, ordinal, 1);
    SecretKey((u128::from(hi) << 64) | u128::from(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: SecretKey = SecretKey::new(0x0123_4567_89ab_cdef_fedc_ba98_7654_3210);

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix64(GOLDEN_GAMMA), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn decisions_are_deterministic() {
        assert_eq!(
            derive_pixel_decisions(K, 5, 9),
            derive_pixel_decisions(K, 5, 9)
        );
        assert!(derive_pixel_decisions(K, 5, 9).x_s < 6);
    }

    #[test]
    fn permutation_edge_cases() {
        assert_eq!(derive_permutation(K, 1), vec![0]);
        assert_eq!(derive_permutation(K, 0), Vec::<usize>::new());
        let mut p = derive_permutation(K, 48);
        p.sort_unstable();
        assert_eq!(p, (0..48).collect::<Vec<_>>());
        assert_eq!(derive_permutation(K, 6), derive_permutation(K, 6));
    }

    #[test]
    fn bitmask_edge_cases() {
        assert!(derive_bitmask(K, 0).is_empty());
        assert_eq!(derive_bitmask(K, 130), derive_bitmask(K, 130));
        assert_eq!(derive_bitmask(K, 70)[..], derive_bitmask(K, 130)[..70]);
    }

    #[test]
    fn labels_separate_streams() {
        let a: Vec<u64> = (0..8).map(|c| K.word(labels::PERMUTATION, 0, c)).collect();
        let b: Vec<u64> = (0..8).map(|c| K.word(labels::BITMASK, 0, c)).collect();
        assert!(a.iter().zip(&b).all(|(x, y)| x != y));
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = K.stream(0, 0);
        for bound in [1u64, 2, 3, 6, 7, 1 << 40, u64::MAX] {
            for _ in 0..50 {
                assert!(s.below(bound) < bound);
            }
        }
    }

    #[test]
    fn key_hex_round_trip() {
        let text = K.to_key_file();
        assert_eq!(text, "0123456789abcdeffedcba9876543210\n");
        assert_eq!(SecretKey::from_key_file(&text).unwrap(), K);
        assert_eq!(
            "0123456789ABCDEFFEDCBA9876543210"
                .parse::<SecretKey>()
                .unwrap(),
            K
        );
        assert!("0123".parse::<SecretKey>().is_err());
        assert!("+123456789abcdeffedcba987654321"
            .parse::<SecretKey>()
            .is_err());
        assert!(SecretKey::from_key_file("0123456789abcdeffedcba9876543210\n\n").is_err());
        assert_eq!(format!("{K:?}"), "SecretKey(..)");
    }

    #[test]
    fn image_keys_differ_by_ordinal() {
        assert_ne!(derive_image_key(K, 0), derive_image_key(K, 1));
        assert_eq!(derive_image_key(K, 3), derive_image_key(K, 3));
    }
}
