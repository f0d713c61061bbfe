//! RGB raster with `L`-bit channels and its binary PPM (P6) encoding.
//!
//! Pixels are stored row-major with the origin at the top left, so pixel
//! `(u, v)` lives at index `v * width + u`. Every other module uses the same
//! addressing.

use crate::error::{Error, Result};

/// One RGB pixel. Channel bounds are enforced by the owning [`Image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pixel {
    pub r: u16,
    pub g: u16,
    pub b: u16,
}

impl Pixel {
    pub const fn new(r: u16, g: u16, b: u16) -> Self {
        Pixel { r, g, b }
    }

    pub const fn gray(value: u16) -> Self {
        Pixel::new(value, value, value)
    }

    pub const fn channels(self) -> [u16; 3] {
        [self.r, self.g, self.b]
    }

    pub const fn from_channels(c: [u16; 3]) -> Self {
        Pixel::new(c[0], c[1], c[2])
    }

    /// Sum over channels of the absolute channel difference.
    pub fn l1_distance(self, other: Pixel) -> u32 {
        self.channels()
            .iter()
            .zip(other.channels())
            .map(|(&a, b)| u32::from(a.abs_diff(b)))
            .sum()
    }
}

/// Largest channel value at `bit_depth` bits, `2^L - 1`.
pub const fn max_value(bit_depth: u8) -> u16 {
    ((1u32 << bit_depth) - 1) as u16
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    bit_depth: u8,
    pixels: Vec<Pixel>,
}

impl Image {
    pub fn new(width: usize, height: usize, bit_depth: u8, pixels: Vec<Pixel>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(1..=16).contains(&bit_depth) {
            return Err(Error::UnsupportedBitDepth(bit_depth));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage(format!("dimensions {width}x{height} overflow")))?;
        if pixels.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} pixels, got {}",
                pixels.len()
            )));
        }
        let max = max_value(bit_depth);
        if let Some(i) = pixels
            .iter()
            .position(|p| p.channels().iter().any(|&c| c > max))
        {
            return Err(Error::InvalidImage(format!(
                "pixel {i} has a channel above {max} for {bit_depth}-bit depth"
            )));
        }
        Ok(Image {
            width,
            height,
            bit_depth,
            pixels,
        })
    }

    /// An image with every pixel set to `fill`.
    pub fn filled(width: usize, height: usize, bit_depth: u8, fill: Pixel) -> Result<Self> {
        Image::new(width, height, bit_depth, vec![fill; width * height])
    }

    /// Builds an image from a per-position generator `f(u, v)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u8,
        mut f: impl FnMut(usize, usize) -> Pixel,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                pixels.push(f(u, v));
            }
        }
        Image::new(width, height, bit_depth, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn max_value(&self) -> u16 {
        max_value(self.bit_depth)
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<Pixel> {
        self.pixels
    }

    pub fn pixel(&self, u: usize, v: usize) -> Pixel {
        self.pixels[v * self.width + u]
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bit_depth == other.bit_depth
    }

    /// Applies `f(u, v, pixel)` to every pixel. The caller must keep channels
    /// within the bit depth; this is checked.
    pub fn map_pixels(&self, mut f: impl FnMut(usize, usize, Pixel) -> Pixel) -> Result<Image> {
        let pixels = self
            .pixels
            .iter()
            .enumerate()
            .map(|(i, &p)| f(i % self.width, i / self.width, p))
            .collect();
        Image::new(self.width, self.height, self.bit_depth, pixels)
    }

    /// Unweighted channel mean, rounded to nearest, replicated into all
    /// three channels.
    pub fn to_grayscale(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            bit_depth: self.bit_depth,
            pixels: self.pixels.iter().map(|&p| gray_of(p)).collect(),
        }
    }

    /// Parses a binary P6 stream with maxval 255 (8-bit) or 65535 (16-bit).
    pub fn from_ppm(bytes: &[u8]) -> Result<Image> {
        let mut cursor = HeaderCursor {
            bytes,
            pos: 0,
            token_start: 0,
        };
        let magic = cursor.token()?;
        if magic != b"P6" {
            return Err(Error::Format {
                offset: 0,
                reason: "missing P6 magic".into(),
            });
        }
        let width = cursor.number("width")?;
        let height = cursor.number("height")?;
        let maxval = cursor.number("maxval")?;
        let maxval_offset = cursor.token_start;
        let bit_depth = match maxval {
            255 => 8,
            65535 => 16,
            other => {
                return Err(Error::Format {
                    offset: maxval_offset,
                    reason: format!("unsupported maxval {other}"),
                })
            }
        };
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cursor.pos) {
            Some(c) if c.is_ascii_whitespace() => cursor.pos += 1,
            _ => {
                return Err(Error::Format {
                    offset: cursor.pos,
                    reason: "expected whitespace after maxval".into(),
                })
            }
        }
        if width == 0 || height == 0 {
            return Err(Error::Format {
                offset: 0,
                reason: format!("zero dimension {width}x{height}"),
            });
        }
        let sample_bytes = if bit_depth == 8 { 1 } else { 2 };
        let needed = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3 * sample_bytes))
            .ok_or_else(|| Error::Format {
                offset: 0,
                reason: "dimensions overflow".into(),
            })?;
        let raster = &bytes[cursor.pos..];
        if raster.len() < needed {
            return Err(Error::Format {
                offset: bytes.len(),
                reason: format!(
                    "truncated raster: need {needed} bytes after offset {}, found {}",
                    cursor.pos,
                    raster.len()
                ),
            });
        }
        let sample = |i: usize| -> u16 {
            if sample_bytes == 1 {
                u16::from(raster[i])
            } else {
                u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]])
            }
        };
        let pixels = (0..width * height)
            .map(|i| Pixel::new(sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)))
            .collect();
        Image::new(width, height, bit_depth, pixels)
    }

    /// Canonical P6 encoding: `P6\n<w> <h>\n<maxval>\n` then big-endian
    /// samples. Only 8- and 16-bit images are representable.
    pub fn to_ppm(&self) -> Result<Vec<u8>> {
        let wide = match self.bit_depth {
            8 => false,
            16 => true,
            other => return Err(Error::UnsupportedBitDepth(other)),
        };
        let header = format!("P6\n{} {}\n{}\n", self.width, self.height, self.max_value());
        let per_sample = if wide { 2 } else { 1 };
        let mut out = Vec::with_capacity(header.len() + self.pixels.len() * 3 * per_sample);
        out.extend_from_slice(header.as_bytes());
        for p in &self.pixels {
            for c in p.channels() {
                if wide {
                    out.extend_from_slice(&c.to_be_bytes());
                } else {
                    out.push(c as u8);
                }
            }
        }
        Ok(out)
    }
}

fn gray_of(p: Pixel) -> Pixel {
    let sum = u32::from(p.r) + u32::from(p.g) + u32::from(p.b);
    // sum/3 never has a fractional part of exactly one half.
    Pixel::gray(((sum + 1) / 3) as u16)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    token_start: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        self.token_start = start;
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() || c == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format {
                offset: start,
                reason: "unexpected end of header".into(),
            });
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &str) -> Result<usize> {
        let tok = self.token()?;
        let start = self.token_start;
        if !tok.iter().all(u8::is_ascii_digit) {
            return Err(Error::Format {
                offset: start,
                reason: format!("{field} is not a decimal number"),
            });
        }
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format {
                offset: start,
                reason: format!("{field} out of range"),
            })
    }
}
