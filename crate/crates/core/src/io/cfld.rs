use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Vec2};

pub const CFLD_MAGIC: [u8; 4] = *b"CFLD";
pub const CFLD_VERSION: u32 = 1;
/// magic, version, rows, cols, pitch_y, pitch_x, wavelength
pub const CFLD_HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8 + 8;

/// Serializes a field: little-endian header then interleaved `(re, im)` f64 pairs, row-major.
pub fn encode_field(field: &ComplexField) -> Vec<u8> {
    let mut out = Vec::with_capacity(CFLD_HEADER_LEN + 16 * field.samples().len());
    out.extend_from_slice(&CFLD_MAGIC);
    out.extend_from_slice(&CFLD_VERSION.to_le_bytes());
    out.extend_from_slice(&(field.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(field.cols() as u32).to_le_bytes());
    out.extend_from_slice(&field.pitch().y.to_le_bytes());
    out.extend_from_slice(&field.pitch().x.to_le_bytes());
    out.extend_from_slice(&field.wavelength().to_le_bytes());
    for z in field.samples() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode_field(bytes: &[u8]) -> Result<ComplexField> {
    if bytes.len() < 4 {
        return Err(Error::TruncatedPayload {
            expected: CFLD_HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != CFLD_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    if bytes.len() < CFLD_HEADER_LEN {
        return Err(Error::TruncatedPayload {
            expected: CFLD_HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let version = u32_at(bytes, 4);
    if version != CFLD_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let rows = u32_at(bytes, 8) as usize;
    let cols = u32_at(bytes, 12) as usize;
    let pitch_y = f64_at(bytes, 16);
    let pitch_x = f64_at(bytes, 24);
    let wavelength = f64_at(bytes, 32);

    let payload = &bytes[CFLD_HEADER_LEN..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| Error::InvalidField(format!("{rows}x{cols} overflows")))?;
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            actual: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::InvalidField(format!(
            "{} trailing bytes after the {rows}x{cols} payload",
            payload.len() - expected
        )));
    }
    let samples = payload
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    ComplexField::new(rows, cols, Vec2::new(pitch_x, pitch_y), wavelength, samples)
}

pub fn write_field(path: impl AsRef<Path>, field: &ComplexField) -> Result<()> {
    fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ComplexField> {
    decode_field(&fs::read(path)?)
}
