//! Ciphertext-only attacks on the per-image-key per-pixel scheme.
//!
//! Neither attack recovers the exact plaintext. Both exploit the fact that
//! neighbouring pixels of natural images have similar channel values:
//!
//! * the basic attack forces every channel to the same leading bit, undoing
//!   most negative-positive flips;
//! * the advanced attack walks the image in scanline order and picks, for
//!   each pixel, the one of its 48 (permutation, flip) options closest in L1
//!   distance to an already-decrypted neighbour.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{max_value, Image, Pixel};
use crate::skk::shuffle_components;

/// Number of (channel permutation, flip mask) combinations.
pub const OPTION_COUNT: usize = 48;

/// Replaces every channel whose leading bit differs from `leading_bit` by its
/// negative.
pub fn skk_basic_coa(ciphertext: &Image, leading_bit: bool) -> Image {
    let l = ciphertext.bit_depth();
    let m = max_value(l);
    let fix = |x: u16| {
        if ((x >> (l - 1)) & 1 == 1) != leading_bit {
            x ^ m
        } else {
            x
        }
    };
    ciphertext
        .map_pixels(|_, _, p| Pixel::new(fix(p.r), fix(p.g), fix(p.b)))
        .expect("flipping keeps channels in range")
}

/// One candidate preimage of a ciphertext pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelOption {
    /// Index into [`crate::skk::CHANNEL_PERMUTATIONS`].
    pub permutation: u8,
    /// Bit `i` flips output channel `i` (R, G, B).
    pub negpos_mask: u8,
    pub candidate: Pixel,
}

impl PixelOption {
    pub fn index(&self) -> usize {
        usize::from(self.permutation) * 8 + usize::from(self.negpos_mask)
    }
}

/// Option `k` (`k = permutation * 8 + mask`) of `p`.
pub fn pixel_option(p: Pixel, index: usize, bit_depth: u8) -> PixelOption {
    assert!(index < OPTION_COUNT, "option index {index} out of range");
    let permutation = (index / 8) as u8;
    let negpos_mask = (index % 8) as u8;
    let m = max_value(bit_depth);
    let mut c = shuffle_components(p, permutation).channels();
    for (i, ch) in c.iter_mut().enumerate() {
        if negpos_mask >> i & 1 == 1 {
            *ch ^= m;
        }
    }
    PixelOption {
        permutation,
        negpos_mask,
        candidate: Pixel::from_channels(c),
    }
}

/// All 48 options of `p`, in index order. Option 0 is `p` itself.
pub fn enumerate_pixel_options(p: Pixel, bit_depth: u8) -> Vec<PixelOption> {
    (0..OPTION_COUNT)
        .map(|k| pixel_option(p, k, bit_depth))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStrategy {
    /// Keep the first pixel as it appears in the ciphertext.
    #[default]
    FixFirst,
    /// One full decryption per option of the first pixel.
    Enumerate48,
}

/// The already-decrypted pixel that `(u, v)` is compared against: the left
/// neighbour, or the pixel above for column 0. `(0, 0)` has none.
pub fn reference_position(u: usize, v: usize) -> Option<(usize, usize)> {
    match (u, v) {
        (0, 0) => None,
        (0, v) => Some((0, v - 1)),
        (u, v) => Some((u - 1, v)),
    }
}

/// The option of `p` minimising L1 distance to `reference`; ties go to the
/// lowest option index.
pub fn closest_option(p: Pixel, reference: Pixel, bit_depth: u8) -> PixelOption {
    let mut best = pixel_option(p, 0, bit_depth);
    let mut best_distance = reference.l1_distance(best.candidate);
    for k in 1..OPTION_COUNT {
        let opt = pixel_option(p, k, bit_depth);
        let d = reference.l1_distance(opt.candidate);
        if d < best_distance {
            best = opt;
            best_distance = d;
        }
    }
    best
}

/// Scanline decryption with the first pixel fixed to `seed_option`.
pub fn advanced_coa_from_seed(ciphertext: &Image, seed_option: usize) -> Result<Image> {
    if seed_option >= OPTION_COUNT {
        return Err(Error::Parameter(format!(
            "seed option {seed_option} outside [0, {OPTION_COUNT})"
        )));
    }
    let (w, l) = (ciphertext.width(), ciphertext.bit_depth());
    let src = ciphertext.pixels();
    let mut out: Vec<Pixel> = Vec::with_capacity(src.len());
    for (i, &p) in src.iter().enumerate() {
        let (u, v) = (i % w, i / w);
        let chosen = match reference_position(u, v) {
            None => pixel_option(p, seed_option, l).candidate,
            Some((ru, rv)) => closest_option(p, out[rv * w + ru], l).candidate,
        };
        out.push(chosen);
    }
    Image::new(w, ciphertext.height(), l, out)
}

/// Advanced attack: one image for [`SeedStrategy::FixFirst`], 48 (in option
/// order) for [`SeedStrategy::Enumerate48`].
pub fn skk_advanced_coa(ciphertext: &Image, strategy: SeedStrategy) -> Result<Vec<Image>> {
    match strategy {
        SeedStrategy::FixFirst => Ok(vec![advanced_coa_from_seed(ciphertext, 0)?]),
        SeedStrategy::Enumerate48 => (0..OPTION_COUNT)
            .map(|k| advanced_coa_from_seed(ciphertext, k))
            .collect(),
    }
}
