//! Initial object-plane phases: the virtual convergent wave used instead of a
//! diffuser, and the uniform random diffuser it replaces.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::field::{Grid, RealGrid, Vec2};

/// Fraction of the hologram side the convergent cone is sized to cover.
pub const CONE_FILL: f64 = 0.5;

/// Focal length that makes a cone leaving an image of side `image_side`
/// shrink to `CONE_FILL * holo_side` after travelling `distance`:
/// `f / (f - z) = S_i / (0.5 * S_h)`.
pub fn focal_length(distance: f64, image_side: f64, holo_side: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::InvalidGeometry(format!("distance {distance} must be positive")));
    }
    if !(holo_side.is_finite() && holo_side > 0.0 && image_side.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "side lengths must be positive, got image {image_side} and hologram {holo_side}"
        )));
    }
    let cone_side = CONE_FILL * holo_side;
    if image_side <= cone_side {
        return Err(Error::InvalidGeometry(format!(
            "image side {image_side} must exceed {CONE_FILL} x hologram side {holo_side}"
        )));
    }
    Ok(distance * image_side / (image_side - cone_side))
}

/// Parameters of the virtual convergent wave on the object plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentPhaseSpec {
    pub focal_length: f64,
    pub offset: Vec2,
    pub wavelength: f64,
    pub image_pitch: Vec2,
    pub rows: usize,
    pub cols: usize,
}

impl ConvergentPhaseSpec {
    pub fn new(
        focal_length: f64,
        offset: Vec2,
        wavelength: f64,
        image_pitch: Vec2,
        shape: (usize, usize),
    ) -> Result<Self> {
        let spec = Self {
            focal_length,
            offset,
            wavelength,
            image_pitch,
            rows: shape.0,
            cols: shape.1,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.focal_length.is_finite() && self.focal_length > 0.0) {
            return Err(Error::InvalidGeometry(format!("focal length {} must be positive", self.focal_length)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::InvalidGeometry(format!("wavelength {} must be positive", self.wavelength)));
        }
        if !self.image_pitch.is_positive() {
            return Err(Error::InvalidGeometry(format!("image pitch {:?} must be positive", self.image_pitch)));
        }
        if !self.offset.is_finite() {
            return Err(Error::InvalidGeometry(format!("offset {:?} must be finite", self.offset)));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidGeometry("empty grid".into()));
        }
        Ok(())
    }

    /// Where the cone axis crosses a plane at `distance` from the object:
    /// `-offset * z / f`. Using this as the hologram-grid shift centres the
    /// converged light on the hologram.
    pub fn cone_center_at(&self, distance: f64) -> Vec2 {
        self.offset.scale(-distance / self.focal_length)
    }
}

/// Unwrapped phase `-pi*((x + ox)^2 + (y + oy)^2) / (lambda * f)` on the
/// sample-centred object grid.
pub fn convergent_phase(spec: &ConvergentPhaseSpec) -> Result<RealGrid> {
    spec.validate()?;
    let k = -PI / (spec.wavelength * spec.focal_length);
    let (hr, hc) = ((spec.rows / 2) as f64, (spec.cols / 2) as f64);
    Ok(Grid::from_fn(spec.rows, spec.cols, |r, c| {
        let x = (c as f64 - hc) * spec.image_pitch.x + spec.offset.x;
        let y = (r as f64 - hr) * spec.image_pitch.y + spec.offset.y;
        k * (x * x + y * y)
    }))
}

/// The convergent wave `exp(i * phase)` factored as `rows[r] * cols[c]`.
///
/// The phase is a sum of an x and a y term, so the wave separates and needs
/// only `rows + cols` trigonometric evaluations instead of `rows * cols`.
pub fn convergent_wave_factors(spec: &ConvergentPhaseSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    spec.validate()?;
    let k = -PI / (spec.wavelength * spec.focal_length);
    let axis = |len: usize, pitch: f64, offset: f64| -> Vec<Complex64> {
        let half = (len / 2) as f64;
        (0..len)
            .map(|j| {
                let t = (j as f64 - half) * pitch + offset;
                Complex64::cis(k * t * t)
            })
            .collect()
    };
    Ok((
        axis(spec.rows, spec.image_pitch.y, spec.offset.y),
        axis(spec.cols, spec.image_pitch.x, spec.offset.x),
    ))
}

/// I.i.d. uniform phases on `[0, 2*pi)` from a Xoshiro256++ stream seeded
/// with `seed` (SplitMix64 seed expansion), drawn in row-major order.
pub fn random_phase(rows: usize, cols: usize, seed: u64) -> RealGrid {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let dist = Uniform::new(0.0, TAU).expect("valid range");
    Grid::from_fn(rows, cols, |_, _| dist.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focal_length_from_reported_sides() {
        let f = focal_length(0.5, 19.1e-3, 3.8e-3).unwrap();
        // 0.5 * 0.0191 / 0.0172
        assert!((f - 0.555_232_558_139_534_9).abs() < 1e-12, "{f}");
    }

    #[test]
    fn wave_factors_match_the_full_phase() {
        let spec = ConvergentPhaseSpec::new(0.2, Vec2::new(3e-4, -1e-4), 532e-9, Vec2::new(1e-5, 2e-5), (12, 9)).unwrap();
        let phase = convergent_phase(&spec).unwrap();
        let (ry, cx) = convergent_wave_factors(&spec).unwrap();
        for r in 0..12 {
            for c in 0..9 {
                let direct = Complex64::cis(*phase.get(r, c));
                assert!((ry[r] * cx[c] - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_sides_give_twice_the_distance() {
        let f = focal_length(0.3, 4e-3, 4e-3).unwrap();
        assert!((f - 0.6).abs() < 1e-15);
    }

    #[test]
    fn half_side_boundary_is_invalid() {
        assert!(matches!(focal_length(0.5, 1.9e-3, 3.8e-3), Err(Error::InvalidGeometry(_))));
        assert!(matches!(focal_length(0.5, 1.0e-3, 3.8e-3), Err(Error::InvalidGeometry(_))));
        assert!(focal_length(0.0, 19.1e-3, 3.8e-3).is_err());
    }

    #[test]
    fn ratio_is_reproduced() {
        let (z, si, sh) = (0.5, 19.1e-3, 3.8e-3);
        let f = focal_length(z, si, sh).unwrap();
        let lhs = f / (f - z);
        let rhs = si / (0.5 * sh);
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    fn spec(n: usize, offset: Vec2, pitch: f64) -> ConvergentPhaseSpec {
        ConvergentPhaseSpec::new(0.555_233, offset, 532e-9, Vec2::splat(pitch), (n, n)).unwrap()
    }

    #[test]
    fn vertex_at_origin_without_offset() {
        let phi = convergent_phase(&spec(8, Vec2::ZERO, 1e-3)).unwrap();
        assert_eq!(*phi.get(4, 4), 0.0);
        // x = 1 mm on the centre row
        let expected = -PI * 1e-6 / (532e-9 * 0.555_233);
        assert!((phi.get(4, 5) - expected).abs() < 1e-9, "{}", phi.get(4, 5));
        assert!((expected + 10.6356).abs() < 1e-4);
    }

    #[test]
    fn offsets_move_the_vertex() {
        // pitch 20.48 mm puts the sample at index -1 exactly on -offset
        let s = spec(4, Vec2::splat(20.48e-3), 20.48e-3);
        let phi = convergent_phase(&s).unwrap();
        assert_eq!(*phi.get(1, 1), 0.0);
        assert!(phi.as_slice().iter().all(|&p| p <= 0.0));
    }

    #[test]
    fn random_phase_is_seeded() {
        let a = random_phase(16, 16, 1);
        let b = random_phase(16, 16, 1);
        let c = random_phase(16, 16, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.as_slice().iter().all(|&p| (0.0..TAU).contains(&p)));
    }

    #[test]
    fn random_phase_mean_is_pi() {
        let a = random_phase(1000, 1000, 7);
        let mean = a.as_slice().iter().sum::<f64>() / 1e6;
        assert!((mean - PI).abs() < 0.01, "{mean}");
    }
}
