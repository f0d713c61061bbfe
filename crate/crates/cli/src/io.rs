use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pixelbreak::{Image, Pixel, SecretKey};

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Reads a P6 file, or a PNG when the extension says so.
pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    if is_png(path) {
        return decode_png(&bytes).with_context(|| format!("cannot decode {}", path.display()));
    }
    Image::from_ppm(&bytes).with_context(|| format!("cannot decode {}", path.display()))
}

pub fn write_image(path: &Path, image: &Image) -> Result<()> {
    let bytes = if is_png(path) {
        encode_png(image)?
    } else {
        image.to_ppm()?
    };
    write_atomic(path, &bytes)
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded.color() {
        image::ColorType::Rgb16
        | image::ColorType::Rgba16
        | image::ColorType::L16
        | image::ColorType::La16 => {
            let rgb = decoded.to_rgb16();
            let px = rgb.pixels().map(|p| Pixel::new(p[0], p[1], p[2])).collect();
            Ok(Image::new(w, h, 16, px)?)
        }
        _ => {
            let rgb = decoded.to_rgb8();
            let px = rgb
                .pixels()
                .map(|p| Pixel::new(p[0].into(), p[1].into(), p[2].into()))
                .collect();
            Ok(Image::new(w, h, 8, px)?)
        }
    }
}

fn encode_png(img: &Image) -> Result<Vec<u8>> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let mut out = std::io::Cursor::new(Vec::new());
    match img.bit_depth() {
        8 => {
            let raw: Vec<u8> = img
                .pixels()
                .iter()
                .flat_map(|p| p.channels().map(|c| c as u8))
                .collect();
            image::RgbImage::from_raw(w, h, raw)
                .expect("buffer size matches")
                .write_to(&mut out, image::ImageFormat::Png)?;
        }
        16 => {
            let raw: Vec<u16> = img.pixels().iter().flat_map(|p| p.channels()).collect();
            image::ImageBuffer::<image::Rgb<u16>, _>::from_raw(w, h, raw)
                .expect("buffer size matches")
                .write_to(&mut out, image::ImageFormat::Png)?;
        }
        l => bail!("cannot encode {l}-bit image as PNG"),
    }
    Ok(out.into_inner())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("cannot create temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Resolves a key given inline or as a file. `flag` names the flag pair in
/// diagnostics.
pub fn load_key(inline: Option<&str>, file: Option<&Path>, flag: &str) -> Result<SecretKey> {
    match (inline, file) {
        (Some(hex), _) => hex.parse().with_context(|| format!("invalid --{flag}")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read --{flag}-file {}", path.display()))?;
            SecretKey::from_key_file(&text)
                .with_context(|| format!("invalid --{flag}-file {}", path.display()))
        }
        (None, None) => bail!("one of --{flag} or --{flag}-file is required"),
    }
}

/// `out.ppm` -> `out.gray.ppm`
pub fn grayscale_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.gray.{}", ext.to_string_lossy()),
        None => format!("{stem}.gray"),
    };
    path.with_file_name(name)
}
