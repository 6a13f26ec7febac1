//! PSNR and single-scale SSIM on 8-bit grayscale images.

use crate::error::{Error, Result};
use crate::field::Gray8;

/// Peak value used by [`psnr`]; fixed to the 8-bit full scale.
pub const PSNR_PEAK: f64 = 255.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsimParams {
    pub window_size: usize,
    pub gaussian_sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window_size: 11,
            gaussian_sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_size < 3 || self.window_size % 2 == 0 {
            return Err(Error::InvalidParams(format!(
                "window size {} must be odd and at least 3",
                self.window_size
            )));
        }
        if !(self.gaussian_sigma > 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma {} must be positive", self.gaussian_sigma)));
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0 && self.dynamic_range > 0.0) {
            return Err(Error::InvalidParams("k1, k2 and dynamic range must be positive".into()));
        }
        Ok(())
    }

    fn kernel(&self) -> Vec<f64> {
        let r = (self.window_size / 2) as f64;
        let two_sigma_sq = 2.0 * self.gaussian_sigma * self.gaussian_sigma;
        let raw: Vec<f64> = (0..self.window_size)
            .map(|i| {
                let d = i as f64 - r;
                (-d * d / two_sigma_sq).exp()
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / sum).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub psnr_db: f64,
    pub ssim: f64,
    pub params: SsimParams,
}

fn ensure_same_shape(a: &Gray8, b: &Gray8) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            actual: b.shape(),
        });
    }
    Ok(())
}

pub fn mse(reference: &Gray8, test: &Gray8) -> Result<f64> {
    ensure_same_shape(reference, test)?;
    let sum: f64 = reference
        .as_slice()
        .iter()
        .zip(test.as_slice())
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sum / reference.as_slice().len() as f64)
}

/// `10*log10(255^2 / MSE)`; identical images give `f64::INFINITY`.
pub fn psnr(reference: &Gray8, test: &Gray8) -> Result<f64> {
    let mse = mse(reference, test)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PSNR_PEAK * PSNR_PEAK / mse).log10())
}

/// Mean Gaussian-weighted SSIM over every window position that lies fully
/// inside the image (no border padding).
pub fn ssim(reference: &Gray8, test: &Gray8, params: &SsimParams) -> Result<f64> {
    ensure_same_shape(reference, test)?;
    params.validate()?;
    let (rows, cols) = reference.shape();
    let w = params.window_size;
    if rows < w || cols < w {
        return Err(Error::ImageTooSmall { rows, cols, window: w });
    }

    let x: Vec<f64> = reference.as_slice().iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = test.as_slice().iter().map(|&v| v as f64).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();

    let kernel = params.kernel();
    let filt = |img: &[f64]| filter_valid(img, rows, cols, &kernel);
    let (mu_x, mu_y) = (filt(&x), filt(&y));
    let (e_xx, e_yy, e_xy) = (filt(&xx), filt(&yy), filt(&xy));

    let c1 = (params.k1 * params.dynamic_range).powi(2);
    let c2 = (params.k2 * params.dynamic_range).powi(2);
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        total += num / den;
    }
    Ok(total / mu_x.len() as f64)
}

/// Separable "valid" correlation with a symmetric kernel.
fn filter_valid(img: &[f64], rows: usize, cols: usize, kernel: &[f64]) -> Vec<f64> {
    let w = kernel.len();
    let out_cols = cols - w + 1;
    let out_rows = rows - w + 1;
    let mut horiz = vec![0.0; rows * out_cols];
    for r in 0..rows {
        let line = &img[r * cols..(r + 1) * cols];
        let dst = &mut horiz[r * out_cols..(r + 1) * out_cols];
        for (c, d) in dst.iter_mut().enumerate() {
            *d = kernel.iter().zip(&line[c..c + w]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0.0; out_rows * out_cols];
    for r in 0..out_rows {
        for (k, &kw) in kernel.iter().enumerate() {
            let src = &horiz[(r + k) * out_cols..(r + k + 1) * out_cols];
            let dst = &mut out[r * out_cols..(r + 1) * out_cols];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += kw * s;
            }
        }
    }
    out
}

pub fn evaluate(reference: &Gray8, test: &Gray8, params: &SsimParams) -> Result<MetricsReport> {
    Ok(MetricsReport {
        psnr_db: psnr(reference, test)?,
        ssim: ssim(reference, test, params)?,
        params: *params,
    })
}
