use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma};

use super::hologram::image_error;
use crate::error::{Error, Result};
use crate::field::{Gray8, Grid, RealGrid, RealImage};

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

fn luma(r: f64, g: f64, b: f64) -> f64 {
    LUMA[0] * r + LUMA[1] * g + LUMA[2] * b
}

/// Loads an 8- or 16-bit grayscale or RGB(A) image as `[0, 1]` luminance.
pub fn load_image(path: impl AsRef<Path>) -> Result<RealImage> {
    let img = image::ImageReader::open(path.as_ref())?
        .with_guessed_format()?
        .decode()
        .map_err(image_error)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values: Vec<f64> = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(b) => b.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect(),
        DynamicImage::ImageLumaA8(b) => b.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLumaA16(b) => b.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageRgb8(b) => b.pixels().map(|p| luma_u8(&p.0[..3])).collect(),
        DynamicImage::ImageRgba8(b) => b.pixels().map(|p| luma_u8(&p.0[..3])).collect(),
        DynamicImage::ImageRgb16(b) => b.pixels().map(|p| luma_u16(&p.0[..3])).collect(),
        DynamicImage::ImageRgba16(b) => b.pixels().map(|p| luma_u16(&p.0[..3])).collect(),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "pixel type {:?} is not 8/16-bit gray or RGB",
                other.color()
            )))
        }
    };
    let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    RealImage::new(Grid::from_vec(h, w, values)?)
}

fn luma_u8(rgb: &[u8]) -> f64 {
    luma(rgb[0] as f64, rgb[1] as f64, rgb[2] as f64) / 255.0
}

fn luma_u16(rgb: &[u16]) -> f64 {
    luma(rgb[0] as f64, rgb[1] as f64, rgb[2] as f64) / 65535.0
}

/// [`load_image`] followed by an optional bilinear resize to `size x size`.
pub fn load_image_resized(path: impl AsRef<Path>, size: Option<usize>) -> Result<RealImage> {
    let img = load_image(path)?;
    match size {
        Some(n) if img.shape() != (n, n) => RealImage::new(resize_bilinear(img.as_grid(), n, n)),
        _ => Ok(img),
    }
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
pub fn resize_bilinear(src: &RealGrid, rows: usize, cols: usize) -> RealGrid {
    let (in_r, in_c) = src.shape();
    let coord = |dst: usize, n_in: usize, n_out: usize| -> (usize, usize, f64) {
        let x = ((dst as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
        let i0 = x.floor() as usize;
        let i1 = (i0 + 1).min(n_in - 1);
        (i0, i1, x - i0 as f64)
    };
    Grid::from_fn(rows, cols, |r, c| {
        let (r0, r1, fr) = coord(r, in_r, rows);
        let (c0, c1, fc) = coord(c, in_c, cols);
        let top = src.get(r0, c0) * (1.0 - fc) + src.get(r0, c1) * fc;
        let bottom = src.get(r1, c0) * (1.0 - fc) + src.get(r1, c1) * fc;
        top * (1.0 - fr) + bottom * fr
    })
}

pub fn save_gray8(path: impl AsRef<Path>, img: &Gray8) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.cols() as u32, img.rows() as u32, img.as_slice().to_vec())
            .expect("buffer matches dimensions");
    buf.save_with_format(path, ImageFormat::Png).map_err(image_error)
}

/// Loads any supported image and quantizes its luminance to 8 bits.
pub fn load_gray8(path: impl AsRef<Path>) -> Result<Gray8> {
    Ok(load_image(path)?.to_gray8())
}
