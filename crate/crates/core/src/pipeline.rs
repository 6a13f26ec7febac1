//! Image -> hologram -> reconstruction plumbing shared by the optimizer and the CLI.

use std::fmt;
use std::str::FromStr;

use crate::diffraction::{make_plan, propagate_inverse_owned, propagate_owned, PropagationPlan};
use crate::encoding::{encode, lift, Encoding, PhaseHologram};
use crate::error::{Error, Result};
use crate::field::{field_from_amplitude_and_phase, normalize_to_u8, ComplexField, Gray8, RealGrid, RealImage, Vec2};
use crate::phase_init::{convergent_phase, convergent_wave_factors, focal_length, random_phase, ConvergentPhaseSpec};

/// Physical setup of an image -> hologram run on a square grid.
///
/// The image (object) plane is the propagation source, the hologram plane the
/// destination. `offset` displaces the convergent wave's axis on the object
/// plane; the hologram grid follows the cone (see [`Geometry::plan`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub wavelength: f64,
    pub holo_pitch: f64,
    pub image_pitch: f64,
    pub distance: f64,
    pub offset: Vec2,
    pub grid: usize,
}

impl Geometry {
    /// 1024^2, 532 nm, 3.74 um hologram pitch, 18.7 um image pitch, 0.5 m, 20.48 mm offsets.
    pub const fn reference() -> Self {
        Self {
            wavelength: 532e-9,
            holo_pitch: 3.74e-6,
            image_pitch: 18.7e-6,
            distance: 0.5,
            offset: Vec2 { x: 20.48e-3, y: 20.48e-3 },
            grid: 1024,
        }
    }

    /// Shrinks the grid to `grid` samples while keeping pitches and
    /// wavelength; distance and offsets scale with the grid so chirp
    /// frequencies, band limit and cone fill stay the same in samples.
    pub fn scaled_to(&self, grid: usize) -> Self {
        let k = grid as f64 / self.grid as f64;
        Self {
            distance: self.distance * k,
            offset: self.offset.scale(k),
            grid,
            ..*self
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid, self.grid)
    }

    pub fn image_side(&self) -> f64 {
        self.grid as f64 * self.image_pitch
    }

    pub fn holo_side(&self) -> f64 {
        self.grid as f64 * self.holo_pitch
    }

    pub fn focal_length(&self) -> Result<f64> {
        focal_length(self.distance, self.image_side(), self.holo_side())
    }

    pub fn convergent_spec(&self) -> Result<ConvergentPhaseSpec> {
        ConvergentPhaseSpec::new(
            self.focal_length()?,
            self.offset,
            self.wavelength,
            Vec2::splat(self.image_pitch),
            self.shape(),
        )
    }

    /// Shift of the hologram grid: where the convergent cone crosses the
    /// hologram plane. Zero when there is no offset.
    pub fn holo_shift(&self) -> Result<Vec2> {
        if self.offset == Vec2::ZERO {
            return Ok(Vec2::ZERO);
        }
        Ok(self.convergent_spec()?.cone_center_at(self.distance))
    }

    /// Image -> hologram plan whose destination grid is centred on the cone.
    pub fn plan(&self) -> Result<PropagationPlan> {
        make_plan(
            self.distance,
            Vec2::splat(self.image_pitch),
            Vec2::splat(self.holo_pitch),
            self.wavelength,
            self.shape(),
            self.holo_shift()?,
        )
    }
}

/// Object-plane phase the target amplitude is multiplied with.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialPhase {
    Random { seed: u64 },
    Convergent(ConvergentPhaseSpec),
    /// A precomputed phase map, e.g. one replayed from a golden file.
    Explicit(RealGrid),
}

impl InitialPhase {
    pub fn phase(&self, shape: (usize, usize)) -> Result<RealGrid> {
        match self {
            InitialPhase::Random { seed } => Ok(random_phase(shape.0, shape.1, *seed)),
            InitialPhase::Convergent(spec) => {
                if (spec.rows, spec.cols) != shape {
                    return Err(Error::ShapeMismatch {
                        expected: shape,
                        actual: (spec.rows, spec.cols),
                    });
                }
                convergent_phase(spec)
            }
            InitialPhase::Explicit(phase) => {
                if phase.shape() != shape {
                    return Err(Error::ShapeMismatch {
                        expected: shape,
                        actual: phase.shape(),
                    });
                }
                Ok(phase.clone())
            }
        }
    }
}

/// How a reconstructed field is turned into a displayable image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rendering {
    /// `|U|`
    #[default]
    Amplitude,
    /// `|U|^2`
    Intensity,
}

impl fmt::Display for Rendering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rendering::Amplitude => "amplitude",
            Rendering::Intensity => "intensity",
        })
    }
}

impl FromStr for Rendering {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "amplitude" => Ok(Rendering::Amplitude),
            "intensity" => Ok(Rendering::Intensity),
            other => Err(format!("unknown rendering {other:?} (expected amplitude or intensity)")),
        }
    }
}

/// `target * exp(i * phase)` on the plan's source (object) grid.
pub fn object_field(target: &RealImage, phase: &RealGrid, plan: &PropagationPlan) -> Result<ComplexField> {
    if target.shape() != plan.shape() {
        return Err(Error::PlanMismatch(format!(
            "target is {:?}, plan grid is {:?}",
            target.shape(),
            plan.shape()
        )));
    }
    field_from_amplitude_and_phase(target.as_grid(), phase, plan.source_pitch(), plan.wavelength())
}

/// `target * exp(i * phase)` for an initial phase choice. A convergent wave
/// is built from its separable factors rather than from the phase map.
pub fn initial_object_field(target: &RealImage, initial: &InitialPhase, plan: &PropagationPlan) -> Result<ComplexField> {
    let InitialPhase::Convergent(spec) = initial else {
        return object_field(target, &initial.phase(plan.shape())?, plan);
    };
    if target.shape() != plan.shape() {
        return Err(Error::PlanMismatch(format!(
            "target is {:?}, plan grid is {:?}",
            target.shape(),
            plan.shape()
        )));
    }
    if (spec.rows, spec.cols) != plan.shape() {
        return Err(Error::ShapeMismatch {
            expected: plan.shape(),
            actual: (spec.rows, spec.cols),
        });
    }
    let (wy, wx) = convergent_wave_factors(spec)?;
    let cols = spec.cols;
    let samples = target
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &a)| wy[i / cols] * wx[i % cols] * a)
        .collect();
    ComplexField::new(spec.rows, cols, plan.source_pitch(), plan.wavelength(), samples)
}

/// Non-iterative hologram: object field, one forward propagation, encoding.
pub fn generate(
    target: &RealImage,
    plan: &PropagationPlan,
    initial: &InitialPhase,
    encoding: Encoding,
) -> Result<PhaseHologram> {
    let object = initial_object_field(target, initial, plan)?;
    let holo_plane = propagate_owned(plan, object)?;
    Ok(encode(&holo_plane, encoding))
}

/// Back-propagates the unit-amplitude hologram field to the object plane.
pub fn reconstruct_field(holo: &PhaseHologram, plan: &PropagationPlan) -> Result<ComplexField> {
    propagate_inverse_owned(plan, lift(holo))
}

pub fn render(field: &ComplexField, rendering: Rendering) -> RealGrid {
    match rendering {
        Rendering::Amplitude => field.amplitude(),
        Rendering::Intensity => field.intensity(),
    }
}

/// Reconstruction normalized to 8 bits (brightest pixel -> 255).
pub fn reconstruct(holo: &PhaseHologram, plan: &PropagationPlan, rendering: Rendering) -> Result<Gray8> {
    let field = reconstruct_field(holo, plan)?;
    Ok(normalize_to_u8(&render(&field, rendering)))
}
