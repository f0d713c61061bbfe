//! Python bindings for `pixelbreak`.

use std::io::Read;

use pixelbreak::attacks::{self, SeedStrategy, SkkSentinels};
use pixelbreak::metrics::{self, AttackReport};
use pixelbreak::oracle::{self, EncryptionOracle};
use pixelbreak::{corpus, skk, tanaka, Error, Pixel, SecretKey};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn err(e: Error) -> PyErr {
    match e {
        Error::InconsistentOracle(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_key(hex: &str) -> PyResult<SecretKey> {
    hex.parse().map_err(err)
}

/// RGB image with 1 to 16 bits per channel.
#[pyclass(frozen, eq, skip_from_py_object, module = "pixelbreak_py")]
#[derive(Clone, PartialEq)]
struct Image(pixelbreak::Image);

#[pymethods]
impl Image {
    /// `pixels` is a row-major list of `(r, g, b)` tuples.
    #[new]
    fn new(
        width: usize,
        height: usize,
        bit_depth: u8,
        pixels: Vec<(u16, u16, u16)>,
    ) -> PyResult<Self> {
        let px = pixels
            .into_iter()
            .map(|(r, g, b)| Pixel::new(r, g, b))
            .collect();
        pixelbreak::Image::new(width, height, bit_depth, px)
            .map(Image)
            .map_err(err)
    }

    #[staticmethod]
    fn from_ppm(data: &[u8]) -> PyResult<Self> {
        pixelbreak::Image::from_ppm(data).map(Image).map_err(err)
    }

    fn to_ppm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        Ok(PyBytes::new(py, &self.0.to_ppm().map_err(err)?))
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn bit_depth(&self) -> u8 {
        self.0.bit_depth()
    }

    fn pixel(&self, u: usize, v: usize) -> PyResult<(u16, u16, u16)> {
        if u >= self.0.width() || v >= self.0.height() {
            return Err(PyValueError::new_err(format!(
                "pixel ({u}, {v}) is out of bounds"
            )));
        }
        let p = self.0.pixel(u, v);
        Ok((p.r, p.g, p.b))
    }

    fn pixels(&self) -> Vec<(u16, u16, u16)> {
        self.0.pixels().iter().map(|p| (p.r, p.g, p.b)).collect()
    }

    fn to_grayscale(&self) -> Self {
        Image(self.0.to_grayscale())
    }

    fn __repr__(&self) -> String {
        format!(
            "Image(width={}, height={}, bit_depth={})",
            self.0.width(),
            self.0.height(),
            self.0.bit_depth()
        )
    }
}

/// Block-scrambling key.
#[pyclass(frozen, module = "pixelbreak_py")]
struct TanakaKey(tanaka::TanakaKey);

#[pymethods]
impl TanakaKey {
    #[new]
    #[pyo3(signature = (key, block_size, reversal = true))]
    fn new(key: &str, block_size: usize, reversal: bool) -> PyResult<Self> {
        tanaka::tanaka_keygen(parse_key(key)?, block_size, reversal)
            .map(TanakaKey)
            .map_err(err)
    }

    #[getter]
    fn block_size(&self) -> usize {
        self.0.block_size()
    }

    fn encrypt(&self, image: &Image) -> PyResult<Image> {
        tanaka::tanaka_encrypt(&image.0, &self.0)
            .map(Image)
            .map_err(err)
    }

    fn decrypt(&self, image: &Image) -> PyResult<Image> {
        tanaka::tanaka_decrypt(&image.0, &self.0)
            .map(Image)
            .map_err(err)
    }

    fn oracle(&self) -> Oracle {
        Oracle(Box::new(oracle::tanaka_oracle(self.0.clone())))
    }
}

/// Per-pixel negative-positive key, optionally with channel shuffling.
#[pyclass(frozen, module = "pixelbreak_py")]
struct SkkKey(skk::SkkKey);

#[pymethods]
impl SkkKey {
    #[new]
    #[pyo3(signature = (key, shuffle = true, index = None))]
    fn new(key: &str, shuffle: bool, index: Option<u64>) -> PyResult<Self> {
        let base = parse_key(key)?;
        let policy = skk::KeyPolicy {
            mode: if index.is_some() {
                skk::KeyMode::PerImage
            } else {
                skk::KeyMode::SameKey
            },
            base,
            shuffle_enabled: shuffle,
        };
        Ok(SkkKey(policy.key_for(index.unwrap_or(0))))
    }

    fn encrypt(&self, image: &Image) -> PyResult<Image> {
        skk::skk_encrypt(&image.0, &self.0).map(Image).map_err(err)
    }

    fn decrypt(&self, image: &Image) -> PyResult<Image> {
        skk::skk_decrypt(&image.0, &self.0).map(Image).map_err(err)
    }

    fn oracle(&self) -> Oracle {
        Oracle(Box::new(oracle::skk_oracle(self.0)))
    }
}

/// Encryption oracle. Holds its key privately and counts queries.
#[pyclass(frozen, module = "pixelbreak_py")]
struct Oracle(Box<dyn EncryptionOracle>);

#[pymethods]
impl Oracle {
    fn query(&self, image: &Image) -> PyResult<Image> {
        self.0.query(&image.0).map(Image).map_err(err)
    }

    #[getter]
    fn query_count(&self) -> u64 {
        self.0.query_count()
    }
}

#[pyfunction]
#[pyo3(signature = (seed = None))]
fn keygen(seed: Option<u64>) -> PyResult<String> {
    let key = match seed {
        Some(s) => pixelbreak::keystream::derive_image_key(SecretKey::new(s.into()), 0),
        None => {
            let mut buf = [0u8; 16];
            std::fs::File::open("/dev/urandom")
                .and_then(|mut f| f.read_exact(&mut buf))
                .map_err(|e| PyRuntimeError::new_err(format!("no system randomness: {e}")))?;
            SecretKey::new(u128::from_le_bytes(buf))
        }
    };
    Ok(key.to_string())
}

#[pyfunction]
#[pyo3(signature = (ciphertext, oracle, block_size, batch = 16))]
fn tanaka_cpa_attack(
    ciphertext: &Image,
    oracle: &Oracle,
    block_size: usize,
    batch: usize,
) -> PyResult<Image> {
    attacks::tanaka_cpa_attack(&ciphertext.0, oracle.0.as_ref(), block_size, batch)
        .map(Image)
        .map_err(err)
}

#[pyfunction]
fn skk_cpa_attack(ciphertext: &Image, oracle: &Oracle) -> PyResult<Image> {
    let sentinels = SkkSentinels::standard(ciphertext.0.bit_depth()).map_err(err)?;
    attacks::skk_cpa_attack_with_oracle(&ciphertext.0, oracle.0.as_ref(), &sentinels)
        .map(Image)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (ciphertext, leading_bit = false))]
fn skk_basic_coa(ciphertext: &Image, leading_bit: bool) -> Image {
    Image(attacks::skk_basic_coa(&ciphertext.0, leading_bit))
}

/// One decryption, or 48 with `enumerate_seeds`.
#[pyfunction]
#[pyo3(signature = (ciphertext, enumerate_seeds = false))]
fn skk_advanced_coa(ciphertext: &Image, enumerate_seeds: bool) -> PyResult<Vec<Image>> {
    let strategy = if enumerate_seeds {
        SeedStrategy::Enumerate48
    } else {
        SeedStrategy::FixFirst
    };
    let outs = attacks::skk_advanced_coa(&ciphertext.0, strategy).map_err(err)?;
    Ok(outs.into_iter().map(Image).collect())
}

#[pyfunction]
fn psnr(a: &Image, b: &Image) -> PyResult<f64> {
    metrics::psnr(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn psnr_gray(a: &Image, b: &Image) -> PyResult<f64> {
    metrics::psnr_gray(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn gradient_energy(image: &Image) -> u64 {
    metrics::gradient_energy(&image.0)
}

#[pyfunction]
fn exact_match(a: &Image, b: &Image) -> bool {
    metrics::exact_match(&a.0, &b.0)
}

#[pyfunction]
#[pyo3(signature = (original, recovered, query_count = 0))]
fn attack_report<'py>(
    py: Python<'py>,
    original: &Image,
    recovered: &Image,
    query_count: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = AttackReport::evaluate(&original.0, &recovered.0, query_count, 0.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("exact_match", r.exact_match)?;
    d.set_item("psnr_db", r.psnr_db)?;
    d.set_item("psnr_gray_db", r.psnr_gray_db)?;
    d.set_item("gradient_energy", r.gradient_energy)?;
    d.set_item("query_count", r.query_count)?;
    d.set_item("wall_time_ms", r.wall_time_ms)?;
    Ok(d)
}

#[pyfunction]
fn sample_names() -> Vec<&'static str> {
    corpus::samples().iter().map(|s| s.name).collect()
}

#[pyfunction]
fn sample(name: &str) -> PyResult<Image> {
    corpus::sample(name)
        .map(|s| Image(s.image()))
        .ok_or_else(|| PyKeyError::new_err(name.to_owned()))
}

#[pymodule]
fn pixelbreak_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Image>()?;
    m.add_class::<TanakaKey>()?;
    m.add_class::<SkkKey>()?;
    m.add_class::<Oracle>()?;
    m.add_function(wrap_pyfunction!(keygen, m)?)?;
    m.add_function(wrap_pyfunction!(tanaka_cpa_attack, m)?)?;
    m.add_function(wrap_pyfunction!(skk_cpa_attack, m)?)?;
    m.add_function(wrap_pyfunction!(skk_basic_coa, m)?)?;
    m.add_function(wrap_pyfunction!(skk_advanced_coa, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(psnr_gray, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_energy, m)?)?;
    m.add_function(wrap_pyfunction!(exact_match, m)?)?;
    m.add_function(wrap_pyfunction!(attack_report, m)?)?;
    m.add_function(wrap_pyfunction!(sample_names, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
