//! Keyed block scrambling.
//!
//! The image is cut into `M×M` blocks. Inside each block the `3M²` colour
//! components are read in slot order (pixels row-major, then R, G, B) and
//! permuted; selected output slots are then reversed, `x -> (2^L - 1) - x`.
//! Every block gets the same permutation and the same reversal mask.
//!
//! Output slot `i` takes source slot `slot_permutation[i]` and is reversed
//! iff `reversal_mask[i]`.

use crate::error::{Error, Result};
use crate::image::{Image, Pixel};
use crate::keystream::{derive_bitmask, derive_permutation, SecretKey};

#[derive(Clone, PartialEq, Eq)]
pub struct TanakaKey {
    block_size: usize,
    slot_permutation: Vec<usize>,
    reversal_mask: Vec<bool>,
    reversal_enabled: bool,
}

impl std::fmt::Debug for TanakaKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TanakaKey")
            .field("block_size", &self.block_size)
            .field("reversal_enabled", &self.reversal_enabled)
            .finish_non_exhaustive()
    }
}

impl TanakaKey {
    /// Builds a key from explicit parts. `reversal_mask` must have one entry
    /// per slot; passing `None` disables reversal.
    pub fn new(
        block_size: usize,
        slot_permutation: Vec<usize>,
        reversal_mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        let slots = slot_count(block_size)?;
        if slot_permutation.len() != slots {
            return Err(Error::Key(format!(
                "slot permutation has {} entries, block needs {slots}",
                slot_permutation.len()
            )));
        }
        let mut seen = vec![false; slots];
        for &s in &slot_permutation {
            if s >= slots || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Key("slot permutation is not a bijection".into()));
            }
        }
        let reversal_enabled = reversal_mask.is_some();
        let reversal_mask = reversal_mask.unwrap_or_else(|| vec![false; slots]);
        if reversal_mask.len() != slots {
            return Err(Error::Key(format!(
                "reversal mask has {} entries, block needs {slots}",
                reversal_mask.len()
            )));
        }
        Ok(TanakaKey {
            block_size,
            slot_permutation,
            reversal_mask,
            reversal_enabled,
        })
    }

    pub fn identity(block_size: usize) -> Result<Self> {
        let slots = slot_count(block_size)?;
        TanakaKey::new(block_size, (0..slots).collect(), None)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn reversal_enabled(&self) -> bool {
        self.reversal_enabled
    }

    pub fn slot_permutation(&self) -> &[usize] {
        &self.slot_permutation
    }

    pub fn reversal_mask(&self) -> &[bool] {
        &self.reversal_mask
    }
}

fn slot_count(block_size: usize) -> Result<usize> {
    if block_size == 0 {
        return Err(Error::Parameter("block size must be at least 1".into()));
    }
    block_size
        .checked_mul(block_size)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Parameter(format!("block size {block_size} is too large")))
}

/// Expands `seed` into a key for `M×M` blocks.
pub fn tanaka_keygen(seed: SecretKey, block_size: usize, reversal: bool) -> Result<TanakaKey> {
    let slots = slot_count(block_size)?;
    TanakaKey::new(
        block_size,
        derive_permutation(seed, slots),
        reversal.then(|| derive_bitmask(seed, slots)),
    )
}

pub fn tanaka_encrypt(image: &Image, key: &TanakaKey) -> Result<Image> {
    let max = image.max_value();
    let perm = &key.slot_permutation;
    let mask = &key.reversal_mask;
    map_blocks(image, key.block_size, |input, output| {
        for (i, out) in output.iter_mut().enumerate() {
            let x = input[perm[i]];
            *out = if mask[i] { max - x } else { x };
        }
    })
}

pub fn tanaka_decrypt(image: &Image, key: &TanakaKey) -> Result<Image> {
    let max = image.max_value();
    let perm = &key.slot_permutation;
    let mask = &key.reversal_mask;
    map_blocks(image, key.block_size, |input, output| {
        for (i, &x) in input.iter().enumerate() {
            output[perm[i]] = if mask[i] { max - x } else { x };
        }
    })
}

pub(crate) fn check_divisible(image: &Image, block_size: usize) -> Result<()> {
    if block_size == 0
        || !image.width().is_multiple_of(block_size)
        || !image.height().is_multiple_of(block_size)
    {
        return Err(Error::Dimension {
            width: image.width(),
            height: image.height(),
            block: block_size,
        });
    }
    Ok(())
}

/// Runs `f(input_slots, output_slots)` on every block and reassembles.
pub(crate) fn map_blocks(
    image: &Image,
    block_size: usize,
    mut f: impl FnMut(&[u16], &mut [u16]),
) -> Result<Image> {
    check_divisible(image, block_size)?;
    let (w, m) = (image.width(), block_size);
    let src = image.pixels();
    let mut out = vec![Pixel::default(); src.len()];
    let mut input = vec![0u16; 3 * m * m];
    let mut output = vec![0u16; 3 * m * m];
    for by in (0..image.height()).step_by(m) {
        for bx in (0..w).step_by(m) {
            for dy in 0..m {
                for dx in 0..m {
                    let c = src[(by + dy) * w + bx + dx].channels();
                    input[3 * (dy * m + dx)..][..3].copy_from_slice(&c);
                }
            }
            f(&input, &mut output);
            for dy in 0..m {
                for dx in 0..m {
                    let k = 3 * (dy * m + dx);
                    out[(by + dy) * w + bx + dx] =
                        Pixel::new(output[k], output[k + 1], output[k + 2]);
                }
            }
        }
    }
    Image::new(image.width(), image.height(), image.bit_depth(), out)
}
