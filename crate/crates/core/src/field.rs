//! Sampled wavefronts and the real-valued grids that travel with them.
//!
//! Every grid is stored row-major. Physical coordinates are sample-centred:
//! column `j` of an `n`-wide grid sits at `x = (j - n/2) * pitch_x`, with no
//! half-pixel offset, and rows follow the same rule along `y`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A pair of physical lengths along x and y, in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const fn splat(v: f64) -> Self {
        Self { x: v, y: v }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub(crate) fn is_positive(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.x > 0.0 && self.y > 0.0
    }

    pub(crate) fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Dense row-major 2-D array.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealGrid = Grid<f64>;

/// 8-bit grayscale image, the representation the quality metrics operate on.
pub type Gray8 = Grid<u8>;

impl<T> Grid<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidImage(format!("empty {rows}x{cols} grid")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "{rows}x{cols} grid needs {} samples, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be non-zero");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub(crate) fn ensure_same_shape<U>(&self, other: &Grid<U>) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(())
    }
}

impl<T: Clone> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be non-zero");
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

/// Grayscale image with every pixel in `[0, 1]`; the target amplitude of a hologram.
#[derive(Clone, Debug, PartialEq)]
pub struct RealImage(RealGrid);

impl RealImage {
    pub fn new(grid: RealGrid) -> Result<Self> {
        if let Some(bad) = grid.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidImage(format!("pixel {bad} outside [0, 1]")));
        }
        Ok(Self(grid))
    }

    /// Builds an image from a generator, clamping each value into `[0, 1]`.
    pub fn from_fn_clamped(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(Grid::from_fn(rows, cols, |r, c| {
            let v = f(r, c);
            if v.is_nan() {
                0.0
            } else {
                v.clamp(0.0, 1.0)
            }
        }))
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn pixels(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_grid(&self) -> &RealGrid {
        &self.0
    }

    pub fn into_grid(self) -> RealGrid {
        self.0
    }

    /// Quantizes to 8 bits with the fixed full-scale mapping `1.0 -> 255`.
    pub fn to_gray8(&self) -> Gray8 {
        self.0.map(|&v| (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8)
    }
}

/// Complex wavefront sampled on a regular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    rows: usize,
    cols: usize,
    pitch: Vec2,
    wavelength: f64,
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(
        rows: usize,
        cols: usize,
        pitch: Vec2,
        wavelength: f64,
        samples: Vec<Complex64>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidField(format!("empty {rows}x{cols} field")));
        }
        if !pitch.is_positive() {
            return Err(Error::InvalidField(format!("non-positive pitch {pitch:?}")));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidField(format!("non-positive wavelength {wavelength}")));
        }
        if samples.len() != rows * cols {
            return Err(Error::InvalidField(format!(
                "{rows}x{cols} field needs {} samples, got {}",
                rows * cols,
                samples.len()
            )));
        }
        if let Some(k) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidField(format!("non-finite sample at index {k}")));
        }
        Ok(Self {
            rows,
            cols,
            pitch,
            wavelength,
            samples,
        })
    }

    pub fn zeros(rows: usize, cols: usize, pitch: Vec2, wavelength: f64) -> Result<Self> {
        Self::new(rows, cols, pitch, wavelength, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    /// Same metadata, new samples. Used internally where the samples are known finite.
    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            samples,
            ..self.clone_meta()
        }
    }

    pub(crate) fn from_parts(
        rows: usize,
        cols: usize,
        pitch: Vec2,
        wavelength: f64,
        samples: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(samples.len(), rows * cols);
        Self {
            rows,
            cols,
            pitch,
            wavelength,
            samples,
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            pitch: self.pitch,
            wavelength: self.wavelength,
            samples: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn pitch(&self) -> Vec2 {
        self.pitch
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.samples[row * self.cols + col]
    }

    /// Element-wise modulus `|U|`.
    pub fn amplitude(&self) -> RealGrid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.samples.iter().map(|z| z.norm()).collect(),
        }
    }

    /// Element-wise `|U|^2`.
    pub fn intensity(&self) -> RealGrid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.samples.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Element-wise principal argument in `(-pi, pi]`, with `arg(0) = 0`.
    pub fn phase(&self) -> RealGrid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.samples.iter().map(|&z| principal_arg(z)).collect(),
        }
    }

    /// Multiplies every sample by a complex scalar.
    pub fn scaled(&self, k: Complex64) -> Result<Self> {
        Self::new(
            self.rows,
            self.cols,
            self.pitch,
            self.wavelength,
            self.samples.iter().map(|&z| z * k).collect(),
        )
    }

    /// Sample-wise sum of two fields on the same grid.
    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }
}

/// `arg(z)` on the branch `(-pi, pi]`; zero maps to zero.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Wraps any finite angle onto `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = phi - two_pi * (phi / two_pi).round();
    if w <= -PI {
        w += two_pi;
    } else if w > PI {
        w -= two_pi;
    }
    w
}

/// Builds `amp * exp(i * phase)` sample by sample.
pub fn field_from_amplitude_and_phase(
    amp: &RealGrid,
    phase: &RealGrid,
    pitch: Vec2,
    wavelength: f64,
) -> Result<ComplexField> {
    amp.ensure_same_shape(phase)?;
    let samples = amp
        .as_slice()
        .iter()
        .zip(phase.as_slice())
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    ComplexField::new(amp.rows(), amp.cols(), pitch, wavelength, samples)
}

/// Linear map `[0, max] -> [0, 255]` with round-half-up; an all-zero input stays zero.
pub fn normalize_to_u8(values: &RealGrid) -> Gray8 {
    let max = values
        .as_slice()
        .iter()
        .copied()
        .fold(0.0_f64, |m, v| if v > m { v } else { m });
    if max <= 0.0 || !max.is_finite() {
        return values.map(|_| 0);
    }
    values.map(|&v| {
        let q = (v / max * 255.0 + 0.5).floor();
        q.clamp(0.0, 255.0) as u8
    })
}

/// `||test - reference|| / ||reference||` over complex samples.
pub fn relative_l2(reference: &[Complex64], test: &[Complex64]) -> f64 {
    assert_eq!(reference.len(), test.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (r, t) in reference.iter().zip(test) {
        num += (t - r).norm_sqr();
        den += r.norm_sqr();
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pitch() -> Vec2 {
        Vec2::splat(8e-6)
    }

    #[test]
    fn unit_amplitude_zero_phase_is_one() {
        let amp = Grid::filled(4, 4, 1.0);
        let phase = Grid::filled(4, 4, 0.0);
        let f = field_from_amplitude_and_phase(&amp, &phase, pitch(), 532e-9).unwrap();
        assert!(f.samples().iter().all(|&z| z == Complex64::new(1.0, 0.0)));
        assert_eq!(f.pitch(), pitch());
        assert_eq!(f.wavelength(), 532e-9);
    }

    #[test]
    fn quarter_turn_gives_i() {
        let amp = Grid::filled(3, 5, 1.0);
        let phase = Grid::filled(3, 5, FRAC_PI_2);
        let f = field_from_amplitude_and_phase(&amp, &phase, pitch(), 532e-9).unwrap();
        for z in f.samples() {
            assert!(z.re.abs() < 1e-15);
            assert!((z.im - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let amp = Grid::filled(4, 4, 1.0);
        let phase = Grid::filled(4, 5, 0.0);
        let err = field_from_amplitude_and_phase(&amp, &phase, pitch(), 532e-9).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn modulus_of_three_four() {
        let f = ComplexField::new(2, 2, pitch(), 532e-9, vec![Complex64::new(3.0, 4.0); 4]).unwrap();
        assert!(f.amplitude().as_slice().iter().all(|&a| a == 5.0));
        let z = ComplexField::zeros(2, 2, pitch(), 532e-9).unwrap();
        assert!(z.amplitude().as_slice().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn phase_branch_conventions() {
        let mk = |z: Complex64| ComplexField::new(1, 2, pitch(), 532e-9, vec![z; 2]).unwrap();
        assert!(mk(Complex64::new(0.0, 1.0))
            .phase()
            .as_slice()
            .iter()
            .all(|&p| (p - FRAC_PI_2).abs() < 1e-15));
        assert!(mk(Complex64::new(-1.0, 0.0)).phase().as_slice().iter().all(|&p| p == PI));
        assert!(mk(Complex64::new(-1.0, -0.0)).phase().as_slice().iter().all(|&p| p == PI));
        assert!(mk(Complex64::new(0.0, 0.0)).phase().as_slice().iter().all(|&p| p == 0.0));
        assert!(mk(Complex64::new(-0.0, -0.0)).phase().as_slice().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn rejects_non_finite_samples() {
        let err = ComplexField::new(1, 1, pitch(), 532e-9, vec![Complex64::new(f64::NAN, 0.0)])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidField(_)));
        assert!(ComplexField::new(1, 1, Vec2::new(0.0, 1.0), 532e-9, vec![Complex64::default()])
            .is_err());
    }

    #[test]
    fn normalize_endpoints() {
        let v = Grid::from_vec(1, 3, vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(normalize_to_u8(&v).as_slice(), &[0, 128, 255]);
        let v = Grid::from_vec(1, 3, vec![0.0, 2.0, 4.0]).unwrap();
        assert_eq!(normalize_to_u8(&v).as_slice(), &[0, 128, 255]);
        let z = Grid::filled(2, 2, 0.0);
        assert_eq!(normalize_to_u8(&z).as_slice(), &[0, 0, 0, 0]);
    }

    #[test]
    fn wrap_phase_lands_on_principal_branch() {
        for &p in &[-7.0, -PI, -3.0, 0.0, 3.0, PI, 7.0, 100.0] {
            let w = wrap_phase(p);
            assert!(w > -PI && w <= PI, "{p} -> {w}");
            assert!((w.cos() - p.cos()).abs() < 1e-12 && (w.sin() - p.sin()).abs() < 1e-12);
        }
        assert_eq!(wrap_phase(-PI), PI);
    }
}
