//! Attacks. None of them takes a key: chosen-plaintext attacks talk to an
//! [`EncryptionOracle`](crate::oracle::EncryptionOracle) or consume helper
//! ciphertexts it produced.

mod coa;
mod skk_cpa;
mod tanaka_cpa;

pub use coa::{
    advanced_coa_from_seed, closest_option, enumerate_pixel_options, pixel_option,
    reference_position, skk_advanced_coa, skk_basic_coa, PixelOption, SeedStrategy, OPTION_COUNT,
};
pub use skk_cpa::{
    recover_pixel, skk_cpa_attack, skk_cpa_attack_with_oracle, skk_helper_image, SkkSentinels,
};
pub use tanaka_cpa::{
    max_batch, tanaka_cpa_attack, tanaka_helper_images, tanaka_helper_images_with,
    tanaka_recover_map, ComponentMap, HelperImage, SlotSource, TanakaHelperSet, TanakaSentinels,
};
