//! Scoring attack outputs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;

/// True iff dimensions, bit depth and every channel agree.
pub fn exact_match(a: &Image, b: &Image) -> bool {
    a == b
}

/// Peak signal-to-noise ratio in dB over all channels of all pixels.
/// Identical images give `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::Mismatch(format!(
            "{}x{}@{} vs {}x{}@{}",
            a.width(),
            a.height(),
            a.bit_depth(),
            b.width(),
            b.height(),
            b.bit_depth()
        )));
    }
    let sse: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .flat_map(|(p, q)| p.channels().into_iter().zip(q.channels()))
        .map(|(x, y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / (3 * a.pixels().len()) as f64;
    let peak = f64::from(a.max_value());
    Ok(10.0 * (peak * peak / mse).log10())
}

/// PSNR between the grayscale versions of both images.
pub fn psnr_gray(a: &Image, b: &Image) -> Result<f64> {
    psnr(&a.to_grayscale(), &b.to_grayscale())
}

/// Sum of per-channel absolute differences over all horizontally and
/// vertically adjacent pixel pairs.
pub fn gradient_energy(image: &Image) -> u64 {
    let (w, h) = (image.width(), image.height());
    let px = image.pixels();
    let mut total = 0u64;
    for v in 0..h {
        for u in 0..w {
            let p = px[v * w + u];
            if u + 1 < w {
                total += u64::from(p.l1_distance(px[v * w + u + 1]));
            }
            if v + 1 < h {
                total += u64::from(p.l1_distance(px[(v + 1) * w + u]));
            }
        }
    }
    total
}

/// Fraction of channels whose leading bit equals `leading_bit`.
pub fn leading_bit_fraction(image: &Image, leading_bit: bool) -> f64 {
    let shift = image.bit_depth() - 1;
    let hits = image
        .pixels()
        .iter()
        .flat_map(|p| p.channels())
        .filter(|&c| ((c >> shift) & 1 == 1) == leading_bit)
        .count();
    hits as f64 / (3 * image.pixels().len()) as f64
}

/// Summary of one attack run against a known original.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub exact_match: bool,
    #[serde(with = "inf_as_string")]
    pub psnr_db: f64,
    #[serde(with = "inf_as_string")]
    pub psnr_gray_db: f64,
    pub gradient_energy: u64,
    pub query_count: u64,
    pub wall_time_ms: f64,
}

impl AttackReport {
    pub fn evaluate(
        original: &Image,
        recovered: &Image,
        query_count: u64,
        wall_time_ms: f64,
    ) -> Result<Self> {
        Ok(AttackReport {
            exact_match: exact_match(original, recovered),
            psnr_db: psnr(original, recovered)?,
            psnr_gray_db: psnr_gray(original, recovered)?,
            gradient_energy: gradient_energy(recovered),
            query_count,
            wall_time_ms,
        })
    }
}

/// `+inf` is written as the string `"inf"`; finite values as numbers.
pub mod inf_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if *value == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*value)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad dB value {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Pixel;

    #[test]
    fn psnr_examples() {
        let a = Image::filled(1, 1, 8, Pixel::gray(0)).unwrap();
        let b = Image::filled(1, 1, 8, Pixel::gray(255)).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!(psnr(&a, &b).unwrap().abs() < 1e-12);
        let c = Image::new(2, 1, 8, vec![Pixel::new(1, 2, 3), Pixel::new(4, 5, 60)]).unwrap();
        let d = Image::new(2, 1, 8, vec![Pixel::new(3, 2, 1), Pixel::new(40, 5, 6)]).unwrap();
        assert_eq!(psnr(&c, &d).unwrap(), psnr(&d, &c).unwrap());
        // MSE = (4 + 4 + 1296 + 2916) / 6
        let expected = 10.0 * (255.0f64 * 255.0 / (4220.0 / 6.0)).log10();
        assert!((psnr(&c, &d).unwrap() - expected).abs() < 1e-12);
        assert!(psnr(&a, &c).is_err());
    }

    #[test]
    fn gradient_examples() {
        let flat = Image::filled(4, 3, 8, Pixel::new(9, 8, 7)).unwrap();
        assert_eq!(gradient_energy(&flat), 0);
        let two = Image::new(2, 1, 8, vec![Pixel::gray(0), Pixel::new(1, 2, 3)]).unwrap();
        assert_eq!(gradient_energy(&two), 6);
        let col = Image::new(1, 2, 8, vec![Pixel::gray(0), Pixel::new(1, 2, 3)]).unwrap();
        assert_eq!(gradient_energy(&col), 6);
    }

    #[test]
    fn exact_match_examples() {
        let a = Image::filled(2, 2, 8, Pixel::gray(5)).unwrap();
        assert!(exact_match(&a, &a));
        let mut px = a.clone().into_pixels();
        px[3].b += 1;
        assert!(!exact_match(&a, &Image::new(2, 2, 8, px).unwrap()));
        assert!(!exact_match(
            &a,
            &Image::filled(4, 1, 8, Pixel::gray(5)).unwrap()
        ));
        assert!(!exact_match(
            &a,
            &Image::filled(2, 2, 16, Pixel::gray(5)).unwrap()
        ));
    }

    #[test]
    fn leading_bits() {
        let img = Image::new(
            2,
            1,
            8,
            vec![Pixel::new(0, 128, 255), Pixel::new(127, 1, 200)],
        )
        .unwrap();
        assert!((leading_bit_fraction(&img, true) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_json_uses_inf_string() {
        let a = Image::filled(2, 2, 8, Pixel::new(1, 2, 3)).unwrap();
        let r = AttackReport::evaluate(&a, &a, 1, 0.5).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"exact_match":true,"psnr_db":"inf","psnr_gray_db":"inf","gradient_energy":0,"query_count":1,"wall_time_ms":0.5}"#
        );
        let back: AttackReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let finite = AttackReport { psnr_db: 12.5, ..r };
        let back: AttackReport =
            serde_json::from_str(&serde_json::to_string(&finite).unwrap()).unwrap();
        assert_eq!(back.psnr_db, 12.5);
    }
}
