//! Band-limited scaled and shifted Fresnel propagation.
//!
//! The discrete Fresnel sum between a source grid of pitch `p_s` and a
//! destination grid of pitch `p_d = s * p_s` (optionally displaced by a
//! shift `o`) is
//!
//! ```text
//! u_d(x_d) = C * sum_n u_s(x_s) * exp(i*pi*(x_d - x_s)^2 / (lambda*z)),
//! C = p_sx * p_sy * exp(i*2*pi*z/lambda) / (i*lambda*z)
//! ```
//!
//! Per axis, with `c = pi*p_s^2/(lambda*z)` and integer sample indices
//! `m` (destination) and `n` (source), the quadratic splits as
//!
//! ```text
//! (x_d - x_s)^2 = p_s^2 * [(s^2 - s)*m^2 + s*(m - n)^2 + (1 - s)*n^2]
//! ```
//!
//! so the sum becomes a chirp multiply, a linear convolution with the chirp
//! `h[k] = exp(i*c*s*k^2)`, and a second chirp multiply. The convolution runs
//! through FFTs zero-padded to twice the grid on each axis. The kernel is
//! truncated to `|k| <= K = lambda*|z| / (2*s*p_s^2)`, the range over which
//! its local frequency stays below Nyquist.
//!
//! The shift adds a linear phase `exp(-i*2*pi*o*n*p_s/(lambda*z))` on the
//! source side and `exp(i*pi*(2*o*s*p_s*m + o^2)/(lambda*z))` on the
//! destination side. Both factorizations are exact, so with the window
//! inactive the result equals [`propagate_direct_dft`] to rounding error.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Vec2};

/// Per-axis grid lengths are limited to this size when calling the direct oracle.
pub const DIRECT_DFT_MAX_SIDE: usize = 128;

/// Tunables for [`make_plan_with_options`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanOptions {
    /// Multiplies the band-limit half-width `K` before flooring. `1.0` is the
    /// Nyquist edge; `f64::INFINITY` disables the window entirely.
    pub window_scale: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self { window_scale: 1.0 }
    }
}

/// Lookup tables for one axis of one propagation direction.
struct AxisTables {
    len: usize,
    source_chirp: Vec<Complex64>,
    dest_chirp: Vec<Complex64>,
    /// Forward FFT (length `2 * len`) of the windowed convolution kernel.
    kernel_spectrum: Vec<Complex64>,
}

impl AxisTables {
    #[allow(clippy::too_many_arguments)]
    fn new(
        len: usize,
        source_pitch: f64,
        dest_pitch: f64,
        wavelength: f64,
        z: f64,
        shift: f64,
        half_width: usize,
        fft: &dyn Fft<f64>,
    ) -> Self {
        let lz = wavelength * z;
        let c = PI * source_pitch * source_pitch / lz;
        let s = dest_pitch / source_pitch;
        let half = (len / 2) as i64;

        let mut source_chirp = Vec::with_capacity(len);
        let mut dest_chirp = Vec::with_capacity(len);
        for j in 0..len {
            let q = j as i64 - half;
            let qf = q as f64;
            let src = c * (1.0 - s) * qf * qf - 2.0 * PI * shift * qf * source_pitch / lz;
            let dst = c * (s * s - s) * qf * qf
                + PI * (2.0 * shift * s * source_pitch * qf + shift * shift) / lz;
            source_chirp.push(Complex64::cis(src));
            dest_chirp.push(Complex64::cis(dst));
        }

        let padded = 2 * len;
        let mut kernel = vec![Complex64::new(0.0, 0.0); padded];
        let n = len as i64;
        for k in -n..n {
            if k.unsigned_abs() as usize > half_width {
                continue;
            }
            let kf = k as f64;
            kernel[k.rem_euclid(2 * n) as usize] = Complex64::cis(c * s * kf * kf);
        }
        fft.process(&mut kernel);

        Self {
            len,
            source_chirp,
            dest_chirp,
            kernel_spectrum: kernel,
        }
    }
}

/// One direction of the scaled Fresnel operator with all tables precomputed.
struct ScaledFresnel {
    distance: f64,
    source_pitch: Vec2,
    dest_pitch: Vec2,
    shift: Vec2,
    x: AxisTables,
    y: AxisTables,
    /// `C` with the inverse-FFT normalization folded in.
    constant: Complex64,
}

impl ScaledFresnel {
    #[allow(clippy::too_many_arguments)]
    fn new(
        distance: f64,
        source_pitch: Vec2,
        dest_pitch: Vec2,
        wavelength: f64,
        shift: Vec2,
        rows: usize,
        cols: usize,
        band_limit: (usize, usize),
        ffts: &FftSet,
    ) -> Self {
        let x = AxisTables::new(
            cols,
            source_pitch.x,
            dest_pitch.x,
            wavelength,
            distance,
            shift.x,
            band_limit.0,
            ffts.row_forward.as_ref(),
        );
        let y = AxisTables::new(
            rows,
            source_pitch.y,
            dest_pitch.y,
            wavelength,
            distance,
            shift.y,
            band_limit.1,
            ffts.col_forward.as_ref(),
        );
        let lz = wavelength * distance;
        let c = Complex64::new(source_pitch.x * source_pitch.y, 0.0)
            * Complex64::cis(2.0 * PI * distance / wavelength)
            / Complex64::new(0.0, lz);
        let norm = 1.0 / (4.0 * rows as f64 * cols as f64);
        Self {
            distance,
            source_pitch,
            dest_pitch,
            shift,
            x,
            y,
            constant: c * norm,
        }
    }

    /// The kernel `h[k_r] * h[k_c]` is separable, so the 2-D linear
    /// convolution is a 1-D convolution along every row followed by one
    /// along every column.
    ///
    /// `data` holds the input samples and receives the output; the input is
    /// consumed by the row stage, so the same buffer carries the result.
    fn apply(&self, ffts: &FftSet, work: &mut Workspace, data: &mut [Complex64]) {
        let rows = self.y.len;
        let cols = self.x.len;
        let pc = 2 * cols;
        let pr = 2 * rows;
        let cs = rows + STRIDE_PAD;
        let zero = Complex64::new(0.0, 0.0);
        let Workspace { blocked, col_major } = work;
        let input = &*data;

        // Source chirp and row convolution, ROW_BLOCK rows per task. Each
        // block is stored column-interleaved: entry (r, c) of a block of
        // height h sits at c * h + r % ROW_BLOCK, so a column of the block is
        // one contiguous run.
        blocked.par_chunks_mut(ROW_BLOCK * cols).enumerate().for_each_init(
            || {
                let len = ffts
                    .row_forward
                    .get_inplace_scratch_len()
                    .max(ffts.row_inverse.get_inplace_scratch_len());
                (vec![zero; ROW_BLOCK * pc], vec![zero; len])
            },
            |(lines, scratch), (b, chunk)| {
                let r0 = b * ROW_BLOCK;
                let h = chunk.len() / cols;
                let lines = &mut lines[..h * pc];
                for (i, line) in lines.chunks_exact_mut(pc).enumerate() {
                    let sy = self.y.source_chirp[r0 + i];
                    let src = &input[(r0 + i) * cols..(r0 + i + 1) * cols];
                    let (data, pad) = line.split_at_mut(cols);
                    for ((out, &u), &sx) in data.iter_mut().zip(src).zip(&self.x.source_chirp) {
                        *out = u * sx * sy;
                    }
                    pad.fill(zero);
                }
                ffts.row_forward.process_with_scratch(lines, scratch);
                for line in lines.chunks_exact_mut(pc) {
                    for (v, &hx) in line.iter_mut().zip(&self.x.kernel_spectrum) {
                        *v *= hx;
                    }
                }
                ffts.row_inverse.process_with_scratch(lines, scratch);
                for (c, run) in chunk.chunks_exact_mut(h).enumerate() {
                    for (i, v) in run.iter_mut().enumerate() {
                        *v = lines[i * pc + c];
                    }
                }
            },
        );

        // Column convolution, COL_GROUP adjacent columns per task, each
        // gathered from the blocks and zero-padded to `2 * rows`.
        let blocked = &*blocked;
        col_major.par_chunks_mut(COL_GROUP * cs).enumerate().for_each_init(
            || {
                let len = ffts
                    .col_forward
                    .get_inplace_scratch_len()
                    .max(ffts.col_inverse.get_inplace_scratch_len());
                (vec![zero; COL_GROUP * pr], vec![zero; len])
            },
            |(padded, scratch), (g, group)| {
                let c0 = g * COL_GROUP;
                let n = group.len().div_ceil(cs);
                let padded = &mut padded[..n * pr];
                for r0 in (0..rows).step_by(ROW_BLOCK) {
                    let h = ROW_BLOCK.min(rows - r0);
                    let base = r0 * cols + c0 * h;
                    let runs = &blocked[base..base + n * h];
                    for (j, run) in runs.chunks_exact(h).enumerate() {
                        padded[j * pr + r0..j * pr + r0 + h].copy_from_slice(run);
                    }
                }
                for line in padded.chunks_exact_mut(pr) {
                    line[rows..].fill(zero);
                }
                ffts.col_forward.process_with_scratch(padded, scratch);
                for line in padded.chunks_exact_mut(pr) {
                    for (v, &hy) in line.iter_mut().zip(&self.y.kernel_spectrum) {
                        *v *= hy;
                    }
                }
                ffts.col_inverse.process_with_scratch(padded, scratch);
                for (j, line) in padded.chunks_exact(pr).enumerate() {
                    group[j * cs..j * cs + rows].copy_from_slice(&line[..rows]);
                }
            },
        );

        // Back to row order with the destination chirp.
        let col_major = &*col_major;
        data.par_chunks_mut(ROW_BLOCK * cols).enumerate().for_each(|(b, dst)| {
            let r0 = b * ROW_BLOCK;
            let h = dst.len() / cols;
            for c in 0..cols {
                let src = &col_major[c * cs + r0..c * cs + r0 + h];
                for (i, &v) in src.iter().enumerate() {
                    dst[i * cols + c] = v;
                }
            }
            for (i, row) in dst.chunks_exact_mut(cols).enumerate() {
                let dy = self.y.dest_chirp[r0 + i] * self.constant;
                for (o, &dx) in row.iter_mut().zip(&self.x.dest_chirp) {
                    *o *= dx * dy;
                }
            }
        });
    }
}

/// Rows transformed together by one task of the row stages.
const ROW_BLOCK: usize = 16;
/// Columns transformed together by one task of the column stage.
const COL_GROUP: usize = 16;
/// Extra elements per column line so that successive lines of power-of-two
/// length do not map onto the same cache sets.
const STRIDE_PAD: usize = 4;

/// Intermediate buffers of one propagation: the row-filtered field in
/// column-interleaved blocks (`rows x cols`) and the column-filtered field
/// (`cols` lines of `rows`, padded by [`STRIDE_PAD`]). Kept with the plan
/// because fresh buffers of this size are page-faulted in on every call,
/// which costs as much as the FFTs themselves on large grids.
struct Workspace {
    blocked: Vec<Complex64>,
    col_major: Vec<Complex64>,
}

impl Workspace {
    fn new(rows: usize, cols: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            blocked: vec![zero; rows * cols],
            col_major: vec![zero; cols * (rows + STRIDE_PAD)],
        }
    }
}

struct FftSet {
    row_forward: Arc<dyn Fft<f64>>,
    row_inverse: Arc<dyn Fft<f64>>,
    col_forward: Arc<dyn Fft<f64>>,
    col_inverse: Arc<dyn Fft<f64>>,
}

impl FftSet {
    fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            row_forward: planner.plan_fft_forward(2 * cols),
            row_inverse: planner.plan_fft_inverse(2 * cols),
            col_forward: planner.plan_fft_forward(2 * rows),
            col_inverse: planner.plan_fft_inverse(2 * rows),
        }
    }
}

/// Immutable scaled-Fresnel propagation operator between an object plane
/// (source) and a hologram plane (destination), together with its inverse.
pub struct PropagationPlan {
    rows: usize,
    cols: usize,
    wavelength: f64,
    band_limit: (usize, usize),
    ffts: FftSet,
    forward: ScaledFresnel,
    inverse: ScaledFresnel,
    workspace: Mutex<Option<Workspace>>,
}

impl std::fmt::Debug for PropagationPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PropagationPlan")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("distance", &self.forward.distance)
            .field("source_pitch", &self.forward.source_pitch)
            .field("dest_pitch", &self.forward.dest_pitch)
            .field("shift", &self.forward.shift)
            .field("wavelength", &self.wavelength)
            .field("band_limit", &self.band_limit)
            .finish()
    }
}

/// Band-limit half-width `floor(lambda*|z| / (2*s*p_s^2))`, in samples.
pub fn band_limit_half_width(distance: f64, source_pitch: f64, dest_pitch: f64, wavelength: f64) -> f64 {
    let s = dest_pitch / source_pitch;
    wavelength * distance.abs() / (2.0 * s * source_pitch * source_pitch)
}

/// Builds a plan with the default Nyquist-edge window.
pub fn make_plan(
    distance: f64,
    source_pitch: Vec2,
    dest_pitch: Vec2,
    wavelength: f64,
    shape: (usize, usize),
    shift: Vec2,
) -> Result<PropagationPlan> {
    make_plan_with_options(
        distance,
        source_pitch,
        dest_pitch,
        wavelength,
        shape,
        shift,
        PlanOptions::default(),
    )
}

pub fn make_plan_with_options(
    distance: f64,
    source_pitch: Vec2,
    dest_pitch: Vec2,
    wavelength: f64,
    shape: (usize, usize),
    shift: Vec2,
    options: PlanOptions,
) -> Result<PropagationPlan> {
    let (rows, cols) = shape;
    if !(distance.is_finite() && distance != 0.0) {
        return Err(Error::InvalidGeometry(format!("propagation distance {distance} must be finite and non-zero")));
    }
    if !source_pitch.is_positive() || !dest_pitch.is_positive() {
        return Err(Error::InvalidGeometry(format!(
            "pitches must be positive, got source {source_pitch:?} and destination {dest_pitch:?}"
        )));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidGeometry(format!("wavelength {wavelength} must be positive")));
    }
    if !shift.is_finite() {
        return Err(Error::InvalidGeometry(format!("shift {shift:?} must be finite")));
    }
    if rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::InvalidGeometry(format!("grid {rows}x{cols} must be even and at least 2x2")));
    }
    if !(options.window_scale > 0.0) {
        return Err(Error::InvalidGeometry(format!("window scale {} must be positive", options.window_scale)));
    }

    let to_samples = |k: f64| -> usize {
        let k = (k * options.window_scale).floor();
        if k >= usize::MAX as f64 {
            usize::MAX
        } else {
            k as usize
        }
    };
    let kx = to_samples(band_limit_half_width(distance, source_pitch.x, dest_pitch.x, wavelength));
    let ky = to_samples(band_limit_half_width(distance, source_pitch.y, dest_pitch.y, wavelength));
    if kx < 1 || ky < 1 {
        return Err(Error::DegeneratePlan { kx, ky });
    }

    let ffts = FftSet::new(rows, cols);
    let forward = ScaledFresnel::new(
        distance,
        source_pitch,
        dest_pitch,
        wavelength,
        shift,
        rows,
        cols,
        (kx, ky),
        &ffts,
    );
    // K is symmetric in the two pitches, so the inverse shares the window.
    let inverse = ScaledFresnel::new(
        -distance,
        dest_pitch,
        source_pitch,
        wavelength,
        shift.scale(-1.0),
        rows,
        cols,
        (kx, ky),
        &ffts,
    );
    Ok(PropagationPlan {
        rows,
        cols,
        wavelength,
        band_limit: (kx, ky),
        ffts,
        forward,
        inverse,
        workspace: Mutex::new(None),
    })
}

impl PropagationPlan {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn distance(&self) -> f64 {
        self.forward.distance
    }

    pub fn source_pitch(&self) -> Vec2 {
        self.forward.source_pitch
    }

    pub fn dest_pitch(&self) -> Vec2 {
        self.forward.dest_pitch
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn shift(&self) -> Vec2 {
        self.forward.shift
    }

    /// Pitch ratio `(s_x, s_y)` of destination over source.
    pub fn scale(&self) -> (f64, f64) {
        let (s, d) = (self.source_pitch(), self.dest_pitch());
        (d.x / s.x, d.y / s.y)
    }

    /// Band-limit half-width `K` in samples along x and y.
    pub fn band_limit(&self) -> (usize, usize) {
        self.band_limit
    }

    /// True when `K` covers every kernel lag on the grid, i.e. no clipping.
    pub fn window_inactive(&self) -> bool {
        self.band_limit.0 >= self.cols && self.band_limit.1 >= self.rows
    }

    /// Applies one direction, reusing the cached workspace unless another
    /// thread holds it.
    fn run(&self, op: &ScaledFresnel, mut data: Vec<Complex64>) -> Vec<Complex64> {
        match self.workspace.try_lock() {
            Ok(mut slot) => {
                let work = slot.get_or_insert_with(|| Workspace::new(self.rows, self.cols));
                op.apply(&self.ffts, work, &mut data)
            }
            Err(_) => op.apply(&self.ffts, &mut Workspace::new(self.rows, self.cols), &mut data),
        }
        data
    }

    fn check(&self, field: &ComplexField, pitch: Vec2, side: &str) -> Result<()> {
        if field.shape() != self.shape() {
            return Err(Error::PlanMismatch(format!(
                "{side} grid is {:?}, field is {:?}",
                self.shape(),
                field.shape()
            )));
        }
        if !close(field.pitch().x, pitch.x) || !close(field.pitch().y, pitch.y) {
            return Err(Error::PlanMismatch(format!(
                "{side} pitch is {pitch:?}, field pitch is {:?}",
                field.pitch()
            )));
        }
        if !close(field.wavelength(), self.wavelength) {
            return Err(Error::PlanMismatch(format!(
                "plan wavelength {} differs from field wavelength {}",
                self.wavelength,
                field.wavelength()
            )));
        }
        Ok(())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Forward scaled propagation from the source plane to the destination plane.
pub fn propagate(plan: &PropagationPlan, field: &ComplexField) -> Result<ComplexField> {
    plan.check(field, plan.forward.source_pitch, "source")?;
    let out = plan.run(&plan.forward, field.samples().to_vec());
    Ok(ComplexField::from_parts(
        plan.rows,
        plan.cols,
        plan.forward.dest_pitch,
        plan.wavelength,
        out,
    ))
}

/// [`propagate`] that reuses the input's sample buffer for the result.
pub fn propagate_owned(plan: &PropagationPlan, field: ComplexField) -> Result<ComplexField> {
    plan.check(&field, plan.forward.source_pitch, "source")?;
    let out = plan.run(&plan.forward, field.into_samples());
    Ok(ComplexField::from_parts(
        plan.rows,
        plan.cols,
        plan.forward.dest_pitch,
        plan.wavelength,
        out,
    ))
}

/// Propagation back from the destination plane: distance negated, pitches
/// swapped, shift negated.
pub fn propagate_inverse(plan: &PropagationPlan, field: &ComplexField) -> Result<ComplexField> {
    plan.check(field, plan.inverse.source_pitch, "destination")?;
    let out = plan.run(&plan.inverse, field.samples().to_vec());
    Ok(ComplexField::from_parts(
        plan.rows,
        plan.cols,
        plan.inverse.dest_pitch,
        plan.wavelength,
        out,
    ))
}

/// [`propagate_inverse`] that reuses the input's sample buffer for the result.
pub fn propagate_inverse_owned(plan: &PropagationPlan, field: ComplexField) -> Result<ComplexField> {
    plan.check(&field, plan.inverse.source_pitch, "destination")?;
    let out = plan.run(&plan.inverse, field.into_samples());
    Ok(ComplexField::from_parts(
        plan.rows,
        plan.cols,
        plan.inverse.dest_pitch,
        plan.wavelength,
        out,
    ))
}

/// Brute-force evaluation of the discrete Fresnel sum: no FFT, no window.
///
/// The source pitch and wavelength are taken from `field`. Costs
/// `O(rows^2 * cols^2)`, so grids wider than [`DIRECT_DFT_MAX_SIDE`] are
/// refused unless `allow_large` is set.
pub fn propagate_direct_dft(
    distance: f64,
    dest_pitch: Vec2,
    shift: Vec2,
    field: &ComplexField,
    allow_large: bool,
) -> Result<ComplexField> {
    let (rows, cols) = field.shape();
    if !allow_large && (rows > DIRECT_DFT_MAX_SIDE || cols > DIRECT_DFT_MAX_SIDE) {
        return Err(Error::OracleTooLarge {
            rows,
            cols,
            limit: DIRECT_DFT_MAX_SIDE,
        });
    }
    if !(distance.is_finite() && distance != 0.0) {
        return Err(Error::InvalidGeometry(format!("propagation distance {distance} must be finite and non-zero")));
    }
    if !dest_pitch.is_positive() || !shift.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "bad destination pitch {dest_pitch:?} or shift {shift:?}"
        )));
    }
    let ps = field.pitch();
    let lambda = field.wavelength();
    let lz = lambda * distance;
    let c = Complex64::new(ps.x * ps.y, 0.0) * Complex64::cis(2.0 * PI * distance / lambda)
        / Complex64::new(0.0, lz);
    let coord = |j: usize, len: usize, pitch: f64| (j as f64 - (len / 2) as f64) * pitch;

    let src = field.samples();
    let mut out = Vec::with_capacity(rows * cols);
    for m_r in 0..rows {
        let yd = coord(m_r, rows, dest_pitch.y) + shift.y;
        for m_c in 0..cols {
            let xd = coord(m_c, cols, dest_pitch.x) + shift.x;
            let mut acc = Complex64::new(0.0, 0.0);
            for n_r in 0..rows {
                let ys = coord(n_r, rows, ps.y);
                for n_c in 0..cols {
                    let u = src[n_r * cols + n_c];
                    if u.re == 0.0 && u.im == 0.0 {
                        continue;
                    }
                    let xs = coord(n_c, cols, ps.x);
                    let r2 = (xd - xs) * (xd - xs) + (yd - ys) * (yd - ys);
                    acc += u * Complex64::cis(PI * r2 / lz);
                }
            }
            out.push(c * acc);
        }
    }
    ComplexField::new(rows, cols, dest_pitch, lambda, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: f64 = 532e-9;

    fn table1_plan() -> Result<PropagationPlan> {
        make_plan(
            0.5,
            Vec2::splat(18.7e-6),
            Vec2::splat(3.74e-6),
            LAMBDA,
            (1024, 1024),
            Vec2::ZERO,
        )
    }

    #[test]
    fn table1_geometry_has_wide_window() {
        let plan = table1_plan().unwrap();
        let (sx, sy) = plan.scale();
        assert!((sx - 0.2).abs() < 1e-12 && (sy - 0.2).abs() < 1e-12);
        // lambda*z / (2 * p_s * p_d) = 2.66e-7 / 1.39876e-10 = 1901.7
        assert_eq!(plan.band_limit(), (1901, 1901));
        assert!(plan.window_inactive());
    }

    #[test]
    fn zero_distance_is_invalid() {
        let err = make_plan(0.0, Vec2::splat(8e-6), Vec2::splat(8e-6), LAMBDA, (32, 32), Vec2::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry(_)));
    }

    #[test]
    fn non_positive_pitch_is_invalid() {
        let err = make_plan(0.1, Vec2::new(-1e-6, 1e-6), Vec2::splat(8e-6), LAMBDA, (32, 32), Vec2::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry(_)));
    }

    #[test]
    fn odd_grid_is_rejected() {
        let err = make_plan(0.1, Vec2::splat(8e-6), Vec2::splat(8e-6), LAMBDA, (33, 32), Vec2::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidGeometry(_)));
    }

    #[test]
    fn short_distance_coarse_pitch_is_degenerate() {
        // K = 532e-9 * 1e-3 / (2 * 5 * 1e-8) = 0.00532
        let err = make_plan(1e-3, Vec2::splat(100e-6), Vec2::splat(500e-6), LAMBDA, (32, 32), Vec2::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::DegeneratePlan { kx: 0, ky: 0 }));
    }

    #[test]
    fn plan_mismatch_on_wrong_pitch_or_shape() {
        let plan = make_plan(0.05, Vec2::splat(8e-6), Vec2::splat(16e-6), LAMBDA, (16, 16), Vec2::ZERO)
            .unwrap();
        let wrong_pitch = ComplexField::zeros(16, 16, Vec2::splat(16e-6), LAMBDA).unwrap();
        assert!(matches!(propagate(&plan, &wrong_pitch), Err(Error::PlanMismatch(_))));
        // the same field is valid on the destination side
        assert!(propagate_inverse(&plan, &wrong_pitch).is_ok());
        let wrong_shape = ComplexField::zeros(8, 16, Vec2::splat(8e-6), LAMBDA).unwrap();
        assert!(matches!(propagate(&plan, &wrong_shape), Err(Error::PlanMismatch(_))));
        let wrong_lambda = ComplexField::zeros(16, 16, Vec2::splat(8e-6), 633e-9).unwrap();
        assert!(matches!(propagate(&plan, &wrong_lambda), Err(Error::PlanMismatch(_))));
    }

    #[test]
    fn owned_variants_match_borrowed() {
        let plan = make_plan(0.05, Vec2::splat(8e-6), Vec2::splat(16e-6), 532e-9, (24, 20), Vec2::splat(5e-5)).unwrap();
        let samples = (0..480).map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let u = ComplexField::new(24, 20, Vec2::splat(8e-6), 532e-9, samples).unwrap();
        let fwd = propagate(&plan, &u).unwrap();
        assert_eq!(propagate_owned(&plan, u.clone()).unwrap(), fwd);
        assert_eq!(propagate_inverse_owned(&plan, fwd.clone()).unwrap(), propagate_inverse(&plan, &fwd).unwrap());
        assert!(propagate_owned(&plan, ComplexField::zeros(20, 24, Vec2::splat(8e-6), 532e-9).unwrap()).is_err());
    }

    #[test]
    fn zero_in_zero_out() {
        let plan = make_plan(0.05, Vec2::splat(8e-6), Vec2::splat(16e-6), LAMBDA, (16, 16), Vec2::ZERO)
            .unwrap();
        let zero = ComplexField::zeros(16, 16, Vec2::splat(8e-6), LAMBDA).unwrap();
        let out = propagate(&plan, &zero).unwrap();
        assert!(out.samples().iter().all(|z| z.norm() == 0.0));
        assert_eq!(out.pitch(), Vec2::splat(16e-6));
        let back = propagate_inverse(&plan, &out).unwrap();
        assert!(back.samples().iter().all(|z| z.norm() == 0.0));
        assert_eq!(back.pitch(), Vec2::splat(8e-6));
    }

    #[test]
    fn oracle_guard() {
        let big = ComplexField::zeros(130, 2, Vec2::splat(8e-6), LAMBDA).unwrap();
        assert!(matches!(
            propagate_direct_dft(0.05, Vec2::splat(8e-6), Vec2::ZERO, &big, false),
            Err(Error::OracleTooLarge { .. })
        ));
        assert!(propagate_direct_dft(0.05, Vec2::splat(8e-6), Vec2::ZERO, &big, true).is_ok());
    }

    #[test]
    fn single_sample_phase_closed_form() {
        let (n, ps, pd, z) = (16usize, 8e-6, 12e-6, 0.03);
        let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
        samples[(n / 2) * n + n / 2] = Complex64::new(1.0, 0.0);
        let field = ComplexField::new(n, n, Vec2::splat(ps), LAMBDA, samples).unwrap();
        let out = propagate_direct_dft(z, Vec2::splat(pd), Vec2::ZERO, &field, false).unwrap();
        for r in 0..n {
            for c in 0..n {
                let x = (c as f64 - 8.0) * pd;
                let y = (r as f64 - 8.0) * pd;
                let expected = PI * (x * x + y * y) / (LAMBDA * z) + 2.0 * PI * z / LAMBDA - PI / 2.0;
                let got = out.get(r, c).arg();
                let diff = crate::field::wrap_phase(got - expected);
                assert!(diff.abs() < 1e-9, "({r},{c}) phase off by {diff}");
                let amp = ps * ps / (LAMBDA * z);
                assert!((out.get(r, c).norm() - amp).abs() < 1e-12 * amp.max(1.0));
            }
        }
    }
}
