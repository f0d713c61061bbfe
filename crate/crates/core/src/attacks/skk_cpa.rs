//! Chosen-plaintext attack on the same-key per-pixel scheme.
//!
//! A single helper image with every pixel `(a, b, c)` is encrypted once.
//! At each position the encrypted helper shows which channels were flipped
//! (a channel equal to some sentinel XOR `2^L - 1`) and, after unflipping,
//! how the channels were permuted. Undoing the same steps on the target
//! ciphertext yields the plaintext exactly.

use crate::error::{Error, Result};
use crate::image::{max_value, Image, Pixel};
use crate::oracle::EncryptionOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkkSentinels {
    values: [u16; 3],
    bit_depth: u8,
}

impl SkkSentinels {
    /// Requires `a, b, c, a^m, b^m, c^m` pairwise distinct, `m = 2^L - 1`.
    pub fn new(a: u16, b: u16, c: u16, bit_depth: u8) -> Result<Self> {
        if !(1..=16).contains(&bit_depth) {
            return Err(Error::UnsupportedBitDepth(bit_depth));
        }
        let m = max_value(bit_depth);
        if [a, b, c].iter().any(|&v| v > m) {
            return Err(Error::Parameter(format!("sentinels must not exceed {m}")));
        }
        let mut all = [a, b, c, a ^ m, b ^ m, c ^ m];
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!(
                "sentinels ({a}, {b}, {c}) collide with their negatives at {bit_depth} bits"
            )));
        }
        Ok(SkkSentinels {
            values: [a, b, c],
            bit_depth,
        })
    }

    /// `(0, 1, 2)`, valid for `L >= 3`.
    pub fn standard(bit_depth: u8) -> Result<Self> {
        SkkSentinels::new(0, 1, 2, bit_depth)
    }

    pub fn values(&self) -> [u16; 3] {
        self.values
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }
}

/// `width × height` image with every pixel set to the sentinels.
pub fn skk_helper_image(width: usize, height: usize, sentinels: &SkkSentinels) -> Result<Image> {
    Image::filled(
        width,
        height,
        sentinels.bit_depth,
        Pixel::from_channels(sentinels.values),
    )
}

/// Recovers one plaintext pixel from its ciphertext and the encrypted
/// helper pixel at the same position.
pub fn recover_pixel(cipher: Pixel, helper: Pixel, sentinels: &SkkSentinels) -> Option<Pixel> {
    let m = max_value(sentinels.bit_depth);
    let flipped = sentinels.values.map(|s| s ^ m);
    let mut h = helper.channels();
    let mut c = cipher.channels();
    for i in 0..3 {
        if flipped.contains(&h[i]) {
            h[i] ^= m;
            c[i] ^= m;
        }
    }
    // Sort the helper back to (a, b, c) and move the ciphertext channels along.
    let mut out = [0u16; 3];
    let mut used = [false; 3];
    for (j, &target) in sentinels.values.iter().enumerate() {
        let i = (0..3).find(|&i| !used[i] && h[i] == target)?;
        used[i] = true;
        out[j] = c[i];
    }
    Some(Pixel::from_channels(out))
}

pub fn skk_cpa_attack(
    ciphertext: &Image,
    encrypted_helper: &Image,
    sentinels: &SkkSentinels,
) -> Result<Image> {
    if !ciphertext.same_shape(encrypted_helper) {
        return Err(Error::Mismatch(format!(
            "ciphertext is {}x{} at {} bits, helper is {}x{} at {} bits",
            ciphertext.width(),
            ciphertext.height(),
            ciphertext.bit_depth(),
            encrypted_helper.width(),
            encrypted_helper.height(),
            encrypted_helper.bit_depth()
        )));
    }
    if ciphertext.bit_depth() != sentinels.bit_depth {
        return Err(Error::Mismatch(format!(
            "sentinels are for {} bits, images are {} bits",
            sentinels.bit_depth,
            ciphertext.bit_depth()
        )));
    }
    let helper = encrypted_helper.pixels();
    let width = ciphertext.width();
    let mut bad = None;
    let out = ciphertext.map_pixels(|u, v, p| {
        recover_pixel(p, helper[v * width + u], sentinels).unwrap_or_else(|| {
            bad.get_or_insert((u, v));
            p
        })
    })?;
    match bad {
        Some((u, v)) => Err(Error::InconsistentOracle(format!(
            "encrypted helper pixel at ({u}, {v}) is not a flipped permutation of the sentinels"
        ))),
        None => Ok(out),
    }
}

/// Builds the helper, spends exactly one oracle query, and recovers.
pub fn skk_cpa_attack_with_oracle(
    ciphertext: &Image,
    oracle: &dyn EncryptionOracle,
    sentinels: &SkkSentinels,
) -> Result<Image> {
    let helper = skk_helper_image(ciphertext.width(), ciphertext.height(), sentinels)?;
    let encrypted = oracle.query(&helper)?;
    skk_cpa_attack(ciphertext, &encrypted, sentinels)
}
