//! Bundled sample photographs.
//!
//! Downscaled centre crops of the public-domain / CC0 sample photos that ship
//! with scikit-image (astronaut, coffee, chelsea, rocket), stored as 8-bit
//! P6 at 32×32 and 96×96.

use crate::image::Image;

pub struct Sample {
    pub name: &'static str,
    ppm: &'static [u8],
}

impl Sample {
    pub fn image(&self) -> Image {
        Image::from_ppm(self.ppm).expect("bundled sample is valid PPM")
    }

    pub fn ppm_bytes(&self) -> &'static [u8] {
        self.ppm
    }
}

macro_rules! sample {
    ($name:literal) => {
        Sample {
            name: $name,
            ppm: include_bytes!(concat!("../assets/corpus/", $name, ".ppm")),
        }
    };
}

pub static SAMPLES: [Sample; 8] = [
    sample!("astronaut_32"),
    sample!("coffee_32"),
    sample!("chelsea_32"),
    sample!("rocket_32"),
    sample!("astronaut_96"),
    sample!("coffee_96"),
    sample!("chelsea_96"),
    sample!("rocket_96"),
];

pub fn samples() -> &'static [Sample] {
    &SAMPLES
}

pub fn sample(name: &str) -> Option<&'static Sample> {
    SAMPLES.iter().find(|s| s.name == name)
}
