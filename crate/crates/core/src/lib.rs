//! Phase-only computer-generated holograms whose reconstruction is larger
//! than the hologram.
//!
//! The pieces compose as a pipeline: a target image is given an initial
//! phase ([`phase_init`]), carried to the hologram plane by band-limited
//! scaled Fresnel propagation ([`diffraction`]), encoded as a phase-only or
//! bleached hologram ([`encoding`]), optionally refined by Gerchberg-Saxton
//! iterations ([`gs`]), reconstructed by inverse propagation
//! ([`pipeline`]) and scored with PSNR/SSIM ([`metrics`]). [`io`] holds the
//! on-disk formats.

pub mod diffraction;
pub mod encoding;
pub mod error;
pub mod field;
pub mod gs;
pub mod io;
pub mod metrics;
pub mod phase_init;
pub mod pipeline;
pub mod testpattern;

pub use diffraction::{
    make_plan, propagate, propagate_direct_dft, propagate_inverse, propagate_inverse_owned, propagate_owned,
    PropagationPlan,
};
pub use encoding::{encode, encode_bleached, encode_phase_only, lift, Encoding, PhaseHologram};
pub use error::{Error, Result};
pub use field::{ComplexField, Gray8, Grid, RealGrid, RealImage, Vec2};
pub use gs::{gs_optimize, GsConfig, GsTrace};
pub use metrics::{psnr, ssim, MetricsReport, SsimParams};
pub use phase_init::{convergent_phase, focal_length, random_phase, ConvergentPhaseSpec};
pub use pipeline::{generate, reconstruct, Geometry, InitialPhase, Rendering};
