//! Chosen-plaintext attack on block scrambling.
//!
//! Helper images of one block each carry distinct sentinel values in a
//! batch of target pixels and a fill value everywhere else. After
//! encryption, the position of each sentinel (or of its reversal) reveals
//! which source slot feeds each ciphertext slot and whether it was reversed.
//! With `N` target pixels per helper, `ceil(M² / N)` queries recover the
//! whole map.
//!
//! All sentinels and the fill are drawn from `[0, 2^(L-1))`, so a reversed
//! value always lands in `[2^(L-1), 2^L)` and reversal is a range test.

use crate::error::{Error, Result};
use crate::image::{max_value, Image, Pixel};
use crate::oracle::EncryptionOracle;
use crate::tanaka::{check_divisible, map_blocks};

/// Sentinel assignment for one batch of target pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TanakaSentinels {
    bit_depth: u8,
    targets: Vec<[u16; 3]>,
    fill: u16,
}

/// Largest batch width for `bit_depth`: `floor(2^(L-1) / 3)`.
pub fn max_batch(bit_depth: u8) -> usize {
    if bit_depth == 0 {
        return 0;
    }
    (1usize << (bit_depth - 1)) / 3
}

impl TanakaSentinels {
    /// Target `k` gets `(3k, 3k+1, 3k+2)`; the fill is `3N`.
    pub fn standard(batch: usize, bit_depth: u8) -> Result<Self> {
        if !(1..=16).contains(&bit_depth) {
            return Err(Error::UnsupportedBitDepth(bit_depth));
        }
        let limit = max_batch(bit_depth);
        if batch == 0 || batch > limit {
            return Err(Error::Parameter(format!(
                "batch {batch} outside [1, {limit}] for {bit_depth}-bit images (need 3N <= 2^(L-1))"
            )));
        }
        let targets = (0..batch)
            .map(|k| {
                let base = (3 * k) as u16;
                [base, base + 1, base + 2]
            })
            .collect();
        TanakaSentinels::new(targets, (3 * batch) as u16, bit_depth)
    }

    /// Custom assignment. All values must be distinct and below `2^(L-1)`.
    pub fn new(targets: Vec<[u16; 3]>, fill: u16, bit_depth: u8) -> Result<Self> {
        if !(1..=16).contains(&bit_depth) {
            return Err(Error::UnsupportedBitDepth(bit_depth));
        }
        if targets.is_empty() {
            return Err(Error::Parameter(
                "at least one target pixel is required".into(),
            ));
        }
        let half = 1u32 << (bit_depth - 1);
        let mut values: Vec<u16> = targets.iter().flatten().copied().collect();
        values.push(fill);
        if let Some(v) = values.iter().find(|&&v| u32::from(v) >= half) {
            return Err(Error::Parameter(format!(
                "sentinel {v} is not below 2^(L-1) = {half}"
            )));
        }
        values.sort_unstable();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("sentinel values must be distinct".into()));
        }
        Ok(TanakaSentinels {
            bit_depth,
            targets,
            fill,
        })
    }

    pub fn batch(&self) -> usize {
        self.targets.len()
    }

    pub fn fill(&self) -> u16 {
        self.fill
    }

    pub fn targets(&self) -> &[[u16; 3]] {
        &self.targets
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }
}

/// One crafted `M×M` plaintext and the block pixels it marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperImage {
    pub image: Image,
    /// Block pixel indices (row-major) carrying sentinels; target `k` of the
    /// sentinel set sits at `target_pixels[k]`.
    pub target_pixels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TanakaHelperSet {
    pub block_size: usize,
    pub sentinels: TanakaSentinels,
    pub helpers: Vec<HelperImage>,
}

/// Builds `ceil(M² / N)` helper images with the standard sentinels.
pub fn tanaka_helper_images(
    block_size: usize,
    bit_depth: u8,
    batch: usize,
) -> Result<TanakaHelperSet> {
    let sentinels = TanakaSentinels::standard(batch, bit_depth)?;
    tanaka_helper_images_with(block_size, sentinels)
}

pub fn tanaka_helper_images_with(
    block_size: usize,
    sentinels: TanakaSentinels,
) -> Result<TanakaHelperSet> {
    if block_size == 0 {
        return Err(Error::Parameter("block size must be at least 1".into()));
    }
    let pixels = block_size * block_size;
    let batch = sentinels.batch();
    let helpers = (0..pixels)
        .step_by(batch)
        .map(|start| {
            let target_pixels: Vec<usize> = (start..(start + batch).min(pixels)).collect();
            let mut raster = vec![Pixel::gray(sentinels.fill); pixels];
            for (k, &t) in target_pixels.iter().enumerate() {
                raster[t] = Pixel::from_channels(sentinels.targets[k]);
            }
            Image::new(block_size, block_size, sentinels.bit_depth, raster).map(|image| {
                HelperImage {
                    image,
                    target_pixels,
                }
            })
        })
        .collect::<Result<_>>()?;
    Ok(TanakaHelperSet {
        block_size,
        sentinels,
        helpers,
    })
}

/// Where one ciphertext slot's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotSource {
    pub source: usize,
    pub reversed: bool,
}

/// The recovered per-block transform: entry `i` describes ciphertext slot `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    block_size: usize,
    slots: Vec<SlotSource>,
}

impl ComponentMap {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn slots(&self) -> &[SlotSource] {
        &self.slots
    }

    /// Undoes the transform on every block: unreverse, then put each value
    /// back in its source slot.
    pub fn invert(&self, ciphertext: &Image) -> Result<Image> {
        let max = ciphertext.max_value();
        map_blocks(ciphertext, self.block_size, |input, output| {
            for (slot, &x) in self.slots.iter().zip(input) {
                output[slot.source] = if slot.reversed { max - x } else { x };
            }
        })
    }
}

/// Reads the component map off the encrypted helpers.
///
/// Fails with [`Error::InconsistentOracle`] if a value is neither a sentinel,
/// a reversed sentinel nor the fill, or if some sentinel is missing or
/// appears twice. Either means the helpers were not all encrypted under one
/// block-scrambling key.
pub fn tanaka_recover_map(set: &TanakaHelperSet, encrypted: &[Image]) -> Result<ComponentMap> {
    let m = set.block_size;
    let slots = 3 * m * m;
    let bit_depth = set.sentinels.bit_depth;
    let max = max_value(bit_depth);
    let half = 1u16 << (bit_depth - 1);
    if encrypted.len() != set.helpers.len() {
        return Err(Error::Mismatch(format!(
            "{} encrypted helpers for {} helper images",
            encrypted.len(),
            set.helpers.len()
        )));
    }

    // Sentinel value -> (target index, channel).
    let mut lookup = vec![None; usize::from(half)];
    for (k, t) in set.sentinels.targets.iter().enumerate() {
        for (c, &v) in t.iter().enumerate() {
            lookup[usize::from(v)] = Some((k, c));
        }
    }

    let mut map: Vec<Option<SlotSource>> = vec![None; slots];
    for (j, (helper, enc)) in set.helpers.iter().zip(encrypted).enumerate() {
        if enc.width() != m || enc.height() != m || enc.bit_depth() != bit_depth {
            return Err(Error::Mismatch(format!(
                "encrypted helper {j} is {}x{} at {} bits, expected {m}x{m} at {bit_depth} bits",
                enc.width(),
                enc.height(),
                enc.bit_depth()
            )));
        }
        let mut found = vec![false; 3 * helper.target_pixels.len()];
        for (pixel_index, p) in enc.pixels().iter().enumerate() {
            for (c, x) in p.channels().into_iter().enumerate() {
                let slot = 3 * pixel_index + c;
                let (value, reversed) = if x >= half {
                    (max - x, true)
                } else {
                    (x, false)
                };
                if value == set.sentinels.fill {
                    continue;
                }
                let (k, channel) = match lookup[usize::from(value)] {
                    Some((k, channel)) if k < helper.target_pixels.len() => (k, channel),
                    _ => {
                        return Err(Error::InconsistentOracle(format!(
                            "helper {j} slot {slot} holds {x}, which is no sentinel of this helper"
                        )))
                    }
                };
                if std::mem::replace(&mut found[3 * k + channel], true) {
                    return Err(Error::InconsistentOracle(format!(
                        "helper {j}: sentinel {value} appears twice"
                    )));
                }
                if map[slot].is_some() {
                    return Err(Error::InconsistentOracle(format!(
                        "ciphertext slot {slot} receives a sentinel from two helpers"
                    )));
                }
                map[slot] = Some(SlotSource {
                    source: 3 * helper.target_pixels[k] + channel,
                    reversed,
                });
            }
        }
        if let Some(missing) = found.iter().position(|&f| !f) {
            return Err(Error::InconsistentOracle(format!(
                "helper {j}: sentinel for target {} channel {} never appears",
                missing / 3,
                missing % 3
            )));
        }
    }

    let slots = map
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                Error::InconsistentOracle(format!("ciphertext slot {i} was never mapped"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComponentMap {
        block_size: m,
        slots,
    })
}

/// Full plaintext recovery using `ceil(M² / N)` oracle queries.
pub fn tanaka_cpa_attack(
    ciphertext: &Image,
    oracle: &dyn EncryptionOracle,
    block_size: usize,
    batch: usize,
) -> Result<Image> {
    check_divisible(ciphertext, block_size)?;
    let set = tanaka_helper_images(block_size, ciphertext.bit_depth(), batch)?;
    let encrypted = set
        .helpers
        .iter()
        .map(|h| oracle.query(&h.image))
        .collect::<Result<Vec<_>>>()?;
    tanaka_recover_map(&set, &encrypted)?.invert(ciphertext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::SecretKey;
    use crate::oracle::{tanaka_oracle, EncryptionOracle};
    use crate::tanaka::{tanaka_encrypt, tanaka_keygen, TanakaKey};

    #[test]
    fn helper_counts() {
        assert_eq!(tanaka_helper_images(4, 8, 1).unwrap().helpers.len(), 16);
        assert_eq!(tanaka_helper_images(4, 8, 16).unwrap().helpers.len(), 1);
        assert_eq!(tanaka_helper_images(4, 8, 42).unwrap().helpers.len(), 1);
        assert_eq!(tanaka_helper_images(4, 8, 5).unwrap().helpers.len(), 4);
        assert!(matches!(
            tanaka_helper_images(4, 8, 43),
            Err(Error::Parameter(_))
        ));
        assert!(tanaka_helper_images(4, 8, 0).is_err());
        assert!(tanaka_helper_images(4, 2, 1).is_err());
        assert_eq!(max_batch(3), 1);
        assert_eq!(max_batch(16), 10922);
    }

    #[test]
    fn helper_layout() {
        let set = tanaka_helper_images(2, 8, 1).unwrap();
        let h = &set.helpers[2];
        assert_eq!(h.target_pixels, vec![2]);
        assert_eq!(h.image.pixel(0, 1), Pixel::new(0, 1, 2));
        assert_eq!(h.image.pixel(0, 0), Pixel::gray(3));
        assert_eq!(h.image.pixel(1, 1), Pixel::gray(3));
    }

    #[test]
    fn partial_last_helper() {
        let set = tanaka_helper_images(3, 8, 4).unwrap();
        assert_eq!(set.helpers.len(), 3);
        assert_eq!(set.helpers[2].target_pixels, vec![8]);
    }

    #[test]
    fn custom_sentinels_are_validated() {
        assert!(TanakaSentinels::new(vec![[0, 1, 2]], 2, 8).is_err());
        assert!(TanakaSentinels::new(vec![[0, 1, 200]], 3, 8).is_err());
        assert!(TanakaSentinels::new(vec![], 3, 8).is_err());
        assert!(TanakaSentinels::new(vec![[10, 20, 30]], 99, 8).is_ok());
    }

    #[test]
    fn identity_oracle_gives_identity_map() {
        let oracle = tanaka_oracle(TanakaKey::identity(4).unwrap());
        let set = tanaka_helper_images(4, 8, 16).unwrap();
        let enc: Vec<Image> = set
            .helpers
            .iter()
            .map(|h| oracle.query(&h.image).unwrap())
            .collect();
        let map = tanaka_recover_map(&set, &enc).unwrap();
        for (i, s) in map.slots().iter().enumerate() {
            assert_eq!(
                *s,
                SlotSource {
                    source: i,
                    reversed: false
                }
            );
        }
    }

    #[test]
    fn recovered_map_matches_key() {
        let key = tanaka_keygen(SecretKey::new(0xabc), 4, true).unwrap();
        let oracle = tanaka_oracle(key.clone());
        for batch in [1, 3, 16] {
            let set = tanaka_helper_images(4, 8, batch).unwrap();
            let enc: Vec<Image> = set
                .helpers
                .iter()
                .map(|h| oracle.query(&h.image).unwrap())
                .collect();
            let map = tanaka_recover_map(&set, &enc).unwrap();
            for (i, s) in map.slots().iter().enumerate() {
                assert_eq!(s.source, key.slot_permutation()[i]);
                assert_eq!(s.reversed, key.reversal_mask()[i]);
            }
        }
    }

    #[test]
    fn identity_oracle_attack_returns_ciphertext() {
        let img = Image::from_fn(8, 8, 8, |u, v| Pixel::new(u as u16 * 30, v as u16, 9)).unwrap();
        let oracle = tanaka_oracle(TanakaKey::identity(4).unwrap());
        assert_eq!(tanaka_cpa_attack(&img, &oracle, 4, 16).unwrap(), img);
    }

    #[test]
    fn garbage_helper_is_inconsistent() {
        let set = tanaka_helper_images(2, 8, 4).unwrap();
        let junk = Image::filled(2, 2, 8, Pixel::gray(90)).unwrap();
        assert!(matches!(
            tanaka_recover_map(&set, &[junk]),
            Err(Error::InconsistentOracle(_))
        ));
        // Fill everywhere: every sentinel missing.
        let blank = Image::filled(2, 2, 8, Pixel::gray(12)).unwrap();
        assert!(matches!(
            tanaka_recover_map(&set, &[blank]),
            Err(Error::InconsistentOracle(_))
        ));
    }

    #[test]
    fn duplicated_sentinel_is_inconsistent() {
        let set = tanaka_helper_images(1, 8, 1).unwrap();
        let dup = Image::filled(1, 1, 8, Pixel::new(0, 0, 2)).unwrap();
        assert!(matches!(
            tanaka_recover_map(&set, &[dup]),
            Err(Error::InconsistentOracle(_))
        ));
    }

    #[test]
    fn wrong_helper_count_or_shape() {
        let set = tanaka_helper_images(2, 8, 1).unwrap();
        assert!(matches!(
            tanaka_recover_map(&set, &[]),
            Err(Error::Mismatch(_))
        ));
        let key = tanaka_keygen(SecretKey::new(1), 2, true).unwrap();
        let mut enc: Vec<Image> = set
            .helpers
            .iter()
            .map(|h| tanaka_encrypt(&h.image, &key).unwrap())
            .collect();
        enc[1] = Image::filled(4, 4, 8, Pixel::gray(0)).unwrap();
        assert!(matches!(
            tanaka_recover_map(&set, &enc),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn non_divisible_ciphertext_rejected_before_querying() {
        let oracle = tanaka_oracle(TanakaKey::identity(4).unwrap());
        let img = Image::filled(6, 4, 8, Pixel::gray(1)).unwrap();
        assert!(matches!(
            tanaka_cpa_attack(&img, &oracle, 4, 16),
            Err(Error::Dimension { .. })
        ));
        assert_eq!(oracle.query_count(), 0);
    }
}
