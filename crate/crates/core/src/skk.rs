//! Per-pixel negative-positive transformation with optional channel shuffle.
//!
//! Each pixel `(u, v)` gets its own decisions from the key: three flip bits
//! (each flipped channel becomes `x ^ (2^L - 1)`) and, when shuffling is
//! enabled, a channel permutation index. Pixels never change position.
//! Encryption flips first, then shuffles; decryption undoes both in reverse
//! order.

use crate::error::{Error, Result};
use crate::image::{max_value, Image, Pixel};
use crate::keystream::{derive_image_key, derive_pixel_decisions, PixelDecisions, SecretKey};

/// Channel permutations in lexicographic order. Output channel `i` of
/// `shuffle_components(p, s)` is input channel `CHANNEL_PERMUTATIONS[s][i]`.
pub const CHANNEL_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SkkKey {
    seed: SecretKey,
    shuffle_enabled: bool,
}

impl std::fmt::Debug for SkkKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SkkKey")
            .field("shuffle_enabled", &self.shuffle_enabled)
            .finish_non_exhaustive()
    }
}

impl SkkKey {
    pub const fn new(seed: SecretKey, shuffle_enabled: bool) -> Self {
        SkkKey {
            seed,
            shuffle_enabled,
        }
    }

    pub fn shuffle_enabled(&self) -> bool {
        self.shuffle_enabled
    }

    /// Decisions for pixel `(u, v)`; `x_s` is forced to 0 when shuffling is off.
    pub fn decisions(&self, u: usize, v: usize) -> PixelDecisions {
        let mut d = derive_pixel_decisions(self.seed, u as u32, v as u32);
        if !self.shuffle_enabled {
            d.x_s = 0;
        }
        d
    }
}

/// Whether every image in a corpus shares one key or gets its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyMode {
    SameKey,
    PerImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPolicy {
    pub mode: KeyMode,
    pub base: SecretKey,
    pub shuffle_enabled: bool,
}

impl KeyPolicy {
    /// Key for the image with the given ordinal. Per-image keys are a keyed
    /// mix of the base seed and the ordinal.
    pub fn key_for(&self, ordinal: u64) -> SkkKey {
        let seed = match self.mode {
            KeyMode::SameKey => self.base,
            KeyMode::PerImage => derive_image_key(self.base, ordinal),
        };
        SkkKey::new(seed, self.shuffle_enabled)
    }
}

/// `value ^ (2^L - 1)` when `flip`, else `value`.
pub fn negpos(value: u16, flip: bool, bit_depth: u8) -> u16 {
    if flip {
        value ^ max_value(bit_depth)
    } else {
        value
    }
}

pub fn shuffle_components(p: Pixel, x_s: u8) -> Pixel {
    let c = p.channels();
    let t = CHANNEL_PERMUTATIONS[usize::from(x_s)];
    Pixel::new(c[t[0]], c[t[1]], c[t[2]])
}

pub fn unshuffle_components(p: Pixel, x_s: u8) -> Pixel {
    let c = p.channels();
    let t = CHANNEL_PERMUTATIONS[usize::from(x_s)];
    let mut out = [0u16; 3];
    for i in 0..3 {
        out[t[i]] = c[i];
    }
    Pixel::from_channels(out)
}

fn flip_channels(p: Pixel, flips: [bool; 3], bit_depth: u8) -> Pixel {
    let c = p.channels();
    Pixel::new(
        negpos(c[0], flips[0], bit_depth),
        negpos(c[1], flips[1], bit_depth),
        negpos(c[2], flips[2], bit_depth),
    )
}

pub fn encrypt_pixel(p: Pixel, d: PixelDecisions, bit_depth: u8) -> Pixel {
    shuffle_components(flip_channels(p, d.flips(), bit_depth), d.x_s)
}

pub fn decrypt_pixel(p: Pixel, d: PixelDecisions, bit_depth: u8) -> Pixel {
    flip_channels(unshuffle_components(p, d.x_s), d.flips(), bit_depth)
}

pub fn skk_encrypt(image: &Image, key: &SkkKey) -> Result<Image> {
    check_coordinates(image)?;
    let l = image.bit_depth();
    image.map_pixels(|u, v, p| encrypt_pixel(p, key.decisions(u, v), l))
}

pub fn skk_decrypt(image: &Image, key: &SkkKey) -> Result<Image> {
    check_coordinates(image)?;
    let l = image.bit_depth();
    image.map_pixels(|u, v, p| decrypt_pixel(p, key.decisions(u, v), l))
}

// Positions are keyed as 32-bit coordinates.
fn check_coordinates(image: &Image) -> Result<()> {
    if image.width() > u32::MAX as usize || image.height() > u32::MAX as usize {
        return Err(Error::InvalidImage(
            "dimensions exceed 32-bit coordinates".into(),
        ));
    }
    Ok(())
}
