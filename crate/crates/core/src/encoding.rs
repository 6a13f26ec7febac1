//! Complex-to-phase encodings for phase-only modulators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{principal_arg, ComplexField, Grid, RealGrid, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Kinoform: the argument of the field.
    PhaseOnly,
    /// Real part of the field, rescaled so its largest magnitude maps to pi.
    Bleached,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::PhaseOnly => "phase-only",
            Encoding::Bleached => "bleached",
        })
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "phase-only" => Ok(Encoding::PhaseOnly),
            "bleached" => Ok(Encoding::Bleached),
            other => Err(format!("unknown encoding {other:?} (expected phase-only or bleached)")),
        }
    }
}

/// Displayable phase hologram.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseHologram {
    pitch: Vec2,
    wavelength: f64,
    phase: RealGrid,
    encoding: Encoding,
    /// Bleached scale factor applied to `Re(U)`; `None` for phase-only.
    scale: Option<f64>,
}

impl PhaseHologram {
    pub fn new(
        phase: RealGrid,
        pitch: Vec2,
        wavelength: f64,
        encoding: Encoding,
        scale: Option<f64>,
    ) -> Result<Self> {
        if !pitch.is_positive() || !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidField(format!(
                "hologram needs positive pitch and wavelength, got {pitch:?} and {wavelength}"
            )));
        }
        for &p in phase.as_slice() {
            if !p.is_finite() {
                return Err(Error::InvalidField("non-finite hologram phase".into()));
            }
            if encoding == Encoding::PhaseOnly && !(p > -PI && p <= PI) {
                return Err(Error::InvalidField(format!("phase-only value {p} outside (-pi, pi]")));
            }
        }
        Ok(Self {
            pitch,
            wavelength,
            phase,
            encoding,
            scale,
        })
    }

    pub fn rows(&self) -> usize {
        self.phase.rows()
    }

    pub fn cols(&self) -> usize {
        self.phase.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.phase.shape()
    }

    pub fn pitch(&self) -> Vec2 {
        self.pitch
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn phase(&self) -> &RealGrid {
        &self.phase
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale
    }
}

pub fn encode_phase_only(field: &ComplexField) -> PhaseHologram {
    let phase = field.phase();
    PhaseHologram {
        pitch: field.pitch(),
        wavelength: field.wavelength(),
        phase,
        encoding: Encoding::PhaseOnly,
        scale: None,
    }
}

/// `phase = alpha * Re(U)` with `alpha = pi / max|Re(U)|`; all zero when `Re(U)` vanishes.
pub fn encode_bleached(field: &ComplexField) -> PhaseHologram {
    let max_re = field.samples().iter().fold(0.0_f64, |m, z| m.max(z.re.abs()));
    let alpha = if max_re > 0.0 { PI / max_re } else { 0.0 };
    let data = field
        .samples()
        .iter()
        .map(|z| (alpha * z.re).clamp(-PI, PI))
        .collect();
    let phase = Grid::from_vec(field.rows(), field.cols(), data).expect("shape preserved");
    PhaseHologram {
        pitch: field.pitch(),
        wavelength: field.wavelength(),
        phase,
        encoding: Encoding::Bleached,
        scale: Some(alpha),
    }
}

pub fn encode(field: &ComplexField, encoding: Encoding) -> PhaseHologram {
    match encoding {
        Encoding::PhaseOnly => encode_phase_only(field),
        Encoding::Bleached => encode_bleached(field),
    }
}

/// Unit-amplitude field `exp(i * phase)`.
pub fn lift(holo: &PhaseHologram) -> ComplexField {
    let samples = holo.phase.as_slice().iter().map(|&p| Complex64::cis(p)).collect();
    ComplexField::from_parts(holo.rows(), holo.cols(), holo.pitch, holo.wavelength, samples)
}

/// Phase of `lift(holo)`, wrapped into `(-pi, pi]`.
pub fn wrapped_phase(holo: &PhaseHologram) -> RealGrid {
    holo.phase.map(|&p| principal_arg(Complex64::cis(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn field(samples: Vec<Complex64>) -> ComplexField {
        let n = samples.len();
        ComplexField::new(1, n, Vec2::splat(4e-6), 532e-9, samples).unwrap()
    }

    #[test]
    fn phase_only_of_diagonal() {
        let h = encode_phase_only(&field(vec![Complex64::new(1.0, 1.0) / 2f64.sqrt(); 4]));
        assert!(h.phase().as_slice().iter().all(|&p| (p - FRAC_PI_4).abs() < 1e-15));
        assert_eq!(h.encoding(), Encoding::PhaseOnly);
        let h = encode_phase_only(&field(vec![Complex64::new(2.5, 0.0); 3]));
        assert!(h.phase().as_slice().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn bleached_normalizes_to_pi() {
        let h = encode_bleached(&field(vec![Complex64::new(1.0, 2.0); 4]));
        assert!(h.phase().as_slice().iter().all(|&p| (p - PI).abs() < 1e-15));
        assert_eq!(h.scale(), Some(PI));

        let h = encode_bleached(&field(vec![Complex64::new(-0.5, 3.0), Complex64::new(0.5, -1.0)]));
        assert_eq!(h.phase().as_slice(), &[-PI, PI]);
        assert!((h.scale().unwrap() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn bleached_zero_field() {
        let h = encode_bleached(&field(vec![Complex64::new(0.0, 0.0); 5]));
        assert!(h.phase().as_slice().iter().all(|&p| p == 0.0));
        let h = encode_bleached(&field(vec![Complex64::new(0.0, 7.0); 5]));
        assert!(h.phase().as_slice().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn lift_has_unit_modulus() {
        let h = encode_phase_only(&field(vec![Complex64::new(0.3, -2.0), Complex64::new(-4.0, 0.1)]));
        let u = lift(&h);
        assert!(u.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let zero = PhaseHologram::new(Grid::filled(2, 2, 0.0), Vec2::splat(1e-6), 532e-9, Encoding::PhaseOnly, None)
            .unwrap();
        assert!(lift(&zero).samples().iter().all(|&z| z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn rejects_out_of_range_phase_only() {
        let bad = PhaseHologram::new(Grid::filled(1, 1, 4.0), Vec2::splat(1e-6), 532e-9, Encoding::PhaseOnly, None);
        assert!(bad.is_err());
        let ok = PhaseHologram::new(Grid::filled(1, 1, 4.0), Vec2::splat(1e-6), 532e-9, Encoding::Bleached, Some(1.0));
        assert!(ok.is_ok());
    }

    #[test]
    fn encoding_names_round_trip() {
        for e in [Encoding::PhaseOnly, Encoding::Bleached] {
            assert_eq!(e.to_string().parse::<Encoding>().unwrap(), e);
        }
        assert!("binary".parse::<Encoding>().is_err());
    }
}
