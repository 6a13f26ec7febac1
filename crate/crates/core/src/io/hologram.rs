use std::collections::HashMap;
use std::ffi::OsString;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, ImageFormat, Luma};

use crate::encoding::{Encoding, PhaseHologram};
use crate::error::{Error, Result};
use crate::field::{wrap_phase, Grid, Vec2};

const SIDECAR_FORMAT: &str = "holo-phase-png";
const SIDECAR_VERSION: u32 = 1;

/// Sidecar location for a hologram PNG: the PNG path with `.meta` appended.
pub fn sidecar_path(png: &Path) -> PathBuf {
    let mut name = OsString::from(png.as_os_str());
    name.push(".meta");
    PathBuf::from(name)
}

/// `round(phi / 2pi * 65535)` after wrapping `phi` onto `[0, 2pi)`.
pub fn phase_to_pixel(phi: f64) -> u16 {
    let mut w = phi.rem_euclid(TAU);
    if w >= TAU {
        w = 0.0;
    }
    (w / TAU * 65535.0).round() as u16
}

fn pixel_to_phase(p: u16) -> f64 {
    wrap_phase(p as f64 / 65535.0 * TAU)
}

/// Writes a 16-bit grayscale PNG plus its `key = value` sidecar.
pub fn write_hologram_png(path: impl AsRef<Path>, holo: &PhaseHologram) -> Result<()> {
    let path = path.as_ref();
    let (rows, cols) = holo.shape();
    let pixels: Vec<u16> = holo.phase().as_slice().iter().map(|&p| phase_to_pixel(p)).collect();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(cols as u32, rows as u32, pixels).expect("buffer matches dimensions");
    img.save_with_format(path, ImageFormat::Png).map_err(image_error)?;

    let mut meta = String::new();
    meta.push_str(&format!("format = {SIDECAR_FORMAT}\n"));
    meta.push_str(&format!("version = {SIDECAR_VERSION}\n"));
    meta.push_str(&format!("rows = {rows}\n"));
    meta.push_str(&format!("cols = {cols}\n"));
    meta.push_str(&format!("pitch_x = {:e}\n", holo.pitch().x));
    meta.push_str(&format!("pitch_y = {:e}\n", holo.pitch().y));
    meta.push_str(&format!("wavelength = {:e}\n", holo.wavelength()));
    meta.push_str(&format!("encoding = {}\n", holo.encoding()));
    if let Some(alpha) = holo.scale() {
        meta.push_str(&format!("scale = {alpha:e}\n"));
    }
    fs::write(sidecar_path(path), meta)?;
    Ok(())
}

pub(crate) fn image_error(e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::UnsupportedFormat(other.to_string()),
    }
}

fn parse_sidecar(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::BadSidecar(format!("line {}: expected key = value", lineno + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn field<T: std::str::FromStr>(map: &HashMap<String, String>, key: &str) -> Result<T> {
    let raw = map
        .get(key)
        .ok_or_else(|| Error::BadSidecar(format!("missing key {key:?}")))?;
    raw.parse()
        .map_err(|_| Error::BadSidecar(format!("cannot parse {key} = {raw:?}")))
}

/// Reads a hologram written by [`write_hologram_png`]; phases come back wrapped into `(-pi, pi]`.
pub fn read_hologram_png(path: impl AsRef<Path>) -> Result<PhaseHologram> {
    let path = path.as_ref();
    let meta_path = sidecar_path(path);
    let text = match fs::read_to_string(&meta_path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingSidecar(meta_path)),
        Err(e) => return Err(e.into()),
    };
    let meta = parse_sidecar(&text)?;
    let format: String = field(&meta, "format")?;
    if format != SIDECAR_FORMAT {
        return Err(Error::BadSidecar(format!("unknown format {format:?}")));
    }
    let version: u32 = field(&meta, "version")?;
    if version != SIDECAR_VERSION {
        return Err(Error::BadSidecar(format!("unsupported sidecar version {version}")));
    }
    let rows: usize = field(&meta, "rows")?;
    let cols: usize = field(&meta, "cols")?;
    let pitch = Vec2::new(field(&meta, "pitch_x")?, field(&meta, "pitch_y")?);
    let wavelength: f64 = field(&meta, "wavelength")?;
    let encoding: Encoding = {
        let raw: String = field(&meta, "encoding")?;
        raw.parse().map_err(Error::BadSidecar)?
    };
    let scale = match meta.get("scale") {
        Some(_) => Some(field::<f64>(&meta, "scale")?),
        None => None,
    };

    let img = image::ImageReader::open(path)?
        .with_guessed_format()?
        .decode()
        .map_err(image_error)?;
    let img = match img {
        image::DynamicImage::ImageLuma16(buf) => buf,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "hologram PNG must be 16-bit grayscale, found {:?}",
                other.color()
            )))
        }
    };
    if (img.height() as usize, img.width() as usize) != (rows, cols) {
        return Err(Error::BadSidecar(format!(
            "sidecar says {rows}x{cols}, image is {}x{}",
            img.height(),
            img.width()
        )));
    }
    let phase = Grid::from_vec(rows, cols, img.into_raw().into_iter().map(pixel_to_phase).collect())?;
    PhaseHologram::new(phase, pitch, wavelength, encoding, scale)
}
