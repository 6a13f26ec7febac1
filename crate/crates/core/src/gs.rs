//! Gerchberg-Saxton error reduction through the scaled propagator.

use crate::diffraction::{propagate_inverse_owned, propagate_owned, PropagationPlan};
use crate::encoding::{encode, lift, Encoding, PhaseHologram};
use crate::error::Result;
use crate::field::{RealGrid, RealImage};
use crate::pipeline::{initial_object_field, object_field, InitialPhase};

#[derive(Clone, Debug, PartialEq)]
pub struct GsConfig {
    pub iterations: usize,
    pub encoding: Encoding,
    pub initial_phase: InitialPhase,
    pub record_trace: bool,
}

impl Default for GsConfig {
    fn default() -> Self {
        Self {
            iterations: 10,
            encoding: Encoding::PhaseOnly,
            initial_phase: InitialPhase::Random { seed: 0 },
            record_trace: true,
        }
    }
}

/// Object-plane residual after each back-propagation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GsTrace {
    pub residuals: Vec<f64>,
}

/// Runs `cfg.iterations` rounds of
/// object constraint -> propagate -> hologram constraint -> back-propagate.
///
/// The hologram constraint encodes with `cfg.encoding` and lifts the result
/// to unit amplitude. With zero iterations the result is the plain
/// generate-then-encode hologram.
pub fn gs_optimize(target: &RealImage, plan: &PropagationPlan, cfg: &GsConfig) -> Result<(PhaseHologram, GsTrace)> {
    let mut object = initial_object_field(target, &cfg.initial_phase, plan)?;
    let mut trace = GsTrace::default();
    let mut iteration = 0;
    loop {
        let holo = encode(&propagate_owned(plan, object)?, cfg.encoding);
        if iteration == cfg.iterations {
            return Ok((holo, trace));
        }
        let back = propagate_inverse_owned(plan, lift(&holo))?;
        if cfg.record_trace {
            trace.residuals.push(amplitude_residual(&back.amplitude(), target));
        }
        object = object_field(target, &back.phase(), plan)?;
        iteration += 1;
    }
}

/// RMS of `b*|u| - target`, with `b` the least-squares gain between the
/// reconstructed amplitude and the target. The gain removes the arbitrary
/// overall scale of a back-propagated unit-amplitude hologram.
pub fn amplitude_residual(amplitude: &RealGrid, target: &RealImage) -> f64 {
    let a = amplitude.as_slice();
    let t = target.pixels();
    let (mut at, mut aa) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(t) {
        at += x * y;
        aa += x * x;
    }
    let gain = if aa > 0.0 { at / aa } else { 0.0 };
    let sum_sq: f64 = a.iter().zip(t).map(|(&x, &y)| (gain * x - y).powi(2)).sum();
    (sum_sq / a.len() as f64).sqrt()
}
