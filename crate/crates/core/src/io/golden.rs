//! Golden vectors: seeded input/expected pairs written as CFLD files plus a
//! line-oriented manifest, so another implementation can replay the engine.
//!
//! Real-valued outputs (phase maps, amplitudes) are stored in the real part
//! of a CFLD field with a zero imaginary part.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use super::cfld::{read_field, write_field};
use crate::diffraction::{make_plan, propagate, propagate_inverse, PropagationPlan};
use crate::encoding::{encode_bleached, encode_phase_only, Encoding, PhaseHologram};
use crate::error::{Error, Result};
use crate::field::{relative_l2, ComplexField, Grid, RealGrid, RealImage, Vec2};
use crate::gs::{gs_optimize, GsConfig};
use crate::phase_init::{convergent_phase, random_phase, ConvergentPhaseSpec};
use crate::pipeline::InitialPhase;

pub const MANIFEST_FILE: &str = "manifest.txt";
const MANIFEST_FORMAT: &str = "holo-golden-manifest";
const MANIFEST_VERSION: u32 = 1;

const GRID: usize = 32;
const LAMBDA: f64 = 532e-9;
const SOURCE_PITCH: f64 = 8e-6;
const DISTANCE: f64 = 0.05;
const SCALES: [f64; 4] = [0.2, 1.0, 2.0, 5.0];

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCase {
    pub id: String,
    pub operation: String,
    /// Primary input, relative to the manifest directory.
    pub input: Option<PathBuf>,
    /// Secondary input (e.g. the initial phase of an optimizer run).
    pub aux: Option<PathBuf>,
    pub expected: PathBuf,
    /// `rel_l2`, `max_abs`, or `phasor_rel_l2` (relative L2 of `exp(i*phase)`).
    pub metric: String,
    pub tolerance: f64,
    pub params: Vec<(String, String)>,
}

impl GoldenCase {
    pub fn param(&self, key: &str) -> Result<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::BadManifest(format!("case {}: missing param {key:?}", self.id)))
    }

    fn param_f64(&self, key: &str) -> Result<f64> {
        let raw = self.param(key)?;
        raw.parse()
            .map_err(|_| Error::BadManifest(format!("case {}: param {key} = {raw:?} is not a number", self.id)))
    }

    fn param_usize(&self, key: &str) -> Result<usize> {
        let raw = self.param(key)?;
        raw.parse()
            .map_err(|_| Error::BadManifest(format!("case {}: param {key} = {raw:?} is not a count", self.id)))
    }

    fn files(&self) -> impl Iterator<Item = &PathBuf> {
        self.input.iter().chain(self.aux.iter()).chain(std::iter::once(&self.expected))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenManifest {
    pub seed: u64,
    pub cases: Vec<GoldenCase>,
}

impl GoldenManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# golden vectors for the scaled-diffraction hologram engine\n");
        out.push_str(&format!("format = {MANIFEST_FORMAT}\n"));
        out.push_str(&format!("version = {MANIFEST_VERSION}\n"));
        out.push_str(&format!("seed = {}\n", self.seed));
        for case in &self.cases {
            out.push_str(&format!("\n[case {}]\n", case.id));
            out.push_str(&format!("operation = {}\n", case.operation));
            let path_or_none = |p: &Option<PathBuf>| p.as_ref().map_or("none".to_string(), |p| p.display().to_string());
            out.push_str(&format!("input = {}\n", path_or_none(&case.input)));
            if case.aux.is_some() {
                out.push_str(&format!("aux = {}\n", path_or_none(&case.aux)));
            }
            out.push_str(&format!("expected = {}\n", case.expected.display()));
            out.push_str(&format!("metric = {}\n", case.metric));
            out.push_str(&format!("tolerance = {:e}\n", case.tolerance));
            for (k, v) in &case.params {
                out.push_str(&format!("param.{k} = {v}\n"));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::BadManifest(format!("line {line}: {msg}"));
        let mut seed = None;
        let mut format_ok = false;
        let mut cases: Vec<PartialCase> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("[case ") {
                let id = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(lineno, "unterminated case header"))?
                    .trim();
                if id.is_empty() {
                    return Err(bad(lineno, "empty case id"));
                }
                cases.push(PartialCase::new(id));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(lineno, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match cases.last_mut() {
                None => match key {
                    "format" => {
                        if value != MANIFEST_FORMAT {
                            return Err(bad(lineno, "unknown manifest format"));
                        }
                        format_ok = true;
                    }
                    "version" => {
                        if value != MANIFEST_VERSION.to_string() {
                            return Err(bad(lineno, "unsupported manifest version"));
                        }
                    }
                    "seed" => seed = Some(value.parse().map_err(|_| bad(lineno, "seed is not an integer"))?),
                    _ => return Err(bad(lineno, &format!("unknown header key {key:?}"))),
                },
                Some(case) => case.set(key, value).map_err(|m| bad(lineno, &m))?,
            }
        }
        if !format_ok {
            return Err(Error::BadManifest("missing format line".into()));
        }
        Ok(Self {
            seed: seed.ok_or_else(|| Error::BadManifest("missing seed".into()))?,
            cases: cases.into_iter().map(PartialCase::finish).collect::<Result<_>>()?,
        })
    }

    /// Checks that every referenced file exists under `dir`.
    pub fn validate(&self, dir: &Path) -> Result<()> {
        for case in &self.cases {
            for f in case.files() {
                if !dir.join(f).is_file() {
                    return Err(Error::BadManifest(format!("case {}: missing file {}", case.id, f.display())));
                }
            }
        }
        Ok(())
    }
}

struct PartialCase {
    id: String,
    operation: Option<String>,
    input: Option<Option<PathBuf>>,
    aux: Option<PathBuf>,
    expected: Option<PathBuf>,
    metric: Option<String>,
    tolerance: Option<f64>,
    params: Vec<(String, String)>,
}

impl PartialCase {
    fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            operation: None,
            input: None,
            aux: None,
            expected: None,
            metric: None,
            tolerance: None,
            params: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let path = |v: &str| if v == "none" { None } else { Some(PathBuf::from(v)) };
        match key {
            "operation" => self.operation = Some(value.to_string()),
            "input" => self.input = Some(path(value)),
            "aux" => self.aux = path(value),
            "expected" => self.expected = Some(PathBuf::from(value)),
            "metric" => self.metric = Some(value.to_string()),
            "tolerance" => self.tolerance = Some(value.parse().map_err(|_| format!("bad tolerance {value:?}"))?),
            k => match k.strip_prefix("param.") {
                Some(name) => self.params.push((name.to_string(), value.to_string())),
                None => return Err(format!("unknown case key {k:?}")),
            },
        }
        Ok(())
    }

    fn finish(self) -> Result<GoldenCase> {
        let missing = |what: &str| Error::BadManifest(format!("case {}: missing {what}", self.id));
        Ok(GoldenCase {
            operation: self.operation.clone().ok_or_else(|| missing("operation"))?,
            input: self.input.clone().ok_or_else(|| missing("input"))?,
            aux: self.aux.clone(),
            expected: self.expected.clone().ok_or_else(|| missing("expected"))?,
            metric: self.metric.clone().ok_or_else(|| missing("metric"))?,
            tolerance: self.tolerance.ok_or_else(|| missing("tolerance"))?,
            params: self.params.clone(),
            id: self.id,
        })
    }
}

pub fn load_manifest(dir: impl AsRef<Path>) -> Result<GoldenManifest> {
    let dir = dir.as_ref();
    let manifest = GoldenManifest::parse(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    manifest.validate(dir)?;
    Ok(manifest)
}

fn random_field(rows: usize, cols: usize, pitch: Vec2, seed: u64) -> ComplexField {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let samples = (0..rows * cols)
        .map(|_| Complex64::new(dist.sample(&mut rng), dist.sample(&mut rng)))
        .collect();
    ComplexField::from_parts(rows, cols, pitch, LAMBDA, samples)
}

fn real_field(grid: &RealGrid, pitch: Vec2, wavelength: f64) -> ComplexField {
    let samples = grid.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    ComplexField::from_parts(grid.rows(), grid.cols(), pitch, wavelength, samples)
}

fn real_part(field: &ComplexField) -> RealGrid {
    Grid::from_vec(field.rows(), field.cols(), field.samples().iter().map(|z| z.re).collect())
        .expect("shape preserved")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn plan_params(
    distance: f64,
    source_pitch: f64,
    dest_pitch: f64,
    shift: f64,
    plan: &PropagationPlan,
) -> Vec<(String, String)> {
    let (kx, ky) = plan.band_limit();
    vec![
        ("distance".into(), num(distance)),
        ("wavelength".into(), num(LAMBDA)),
        ("source_pitch_x".into(), num(source_pitch)),
        ("source_pitch_y".into(), num(source_pitch)),
        ("dest_pitch_x".into(), num(dest_pitch)),
        ("dest_pitch_y".into(), num(dest_pitch)),
        ("shift_x".into(), num(shift)),
        ("shift_y".into(), num(shift)),
        ("rows".into(), plan.shape().0.to_string()),
        ("cols".into(), plan.shape().1.to_string()),
        ("band_limit_x".into(), kx.to_string()),
        ("band_limit_y".into(), ky.to_string()),
    ]
}

fn plan_from_params(case: &GoldenCase) -> Result<PropagationPlan> {
    make_plan(
        case.param_f64("distance")?,
        Vec2::new(case.param_f64("source_pitch_x")?, case.param_f64("source_pitch_y")?),
        Vec2::new(case.param_f64("dest_pitch_x")?, case.param_f64("dest_pitch_y")?),
        case.param_f64("wavelength")?,
        (case.param_usize("rows")?, case.param_usize("cols")?),
        Vec2::new(case.param_f64("shift_x")?, case.param_f64("shift_y")?),
    )
}

/// Writes the fixed golden suite into `dir` and returns its manifest.
///
/// Cases: forward propagation at every scale in `{0.2, 1, 2, 5}` with and
/// without a `10 * p_d` shift, one case with the band-limit window active,
/// one inverse propagation, two convergent phase maps, both encodings, and a
/// three-iteration Gerchberg-Saxton run. Output is byte-identical for a
/// fixed seed.
pub fn emit_goldens(dir: impl AsRef<Path>, seed: u64) -> Result<GoldenManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut cases = Vec::new();
    let mut case_seed = seed;
    let mut next_seed = || {
        case_seed = case_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        case_seed
    };
    let src_pitch = Vec2::splat(SOURCE_PITCH);

    let push_prop = |cases: &mut Vec<GoldenCase>,
                         id: String,
                         operation: &str,
                         distance: f64,
                         dest: f64,
                         shift: f64,
                         field_seed: u64|
     -> Result<()> {
        let plan = make_plan(
            distance,
            src_pitch,
            Vec2::splat(dest),
            LAMBDA,
            (GRID, GRID),
            Vec2::splat(shift),
        )?;
        let (input, output) = if operation == "propagate" {
            let input = random_field(GRID, GRID, src_pitch, field_seed);
            let out = propagate(&plan, &input)?;
            (input, out)
        } else {
            let input = random_field(GRID, GRID, Vec2::splat(dest), field_seed);
            let out = propagate_inverse(&plan, &input)?;
            (input, out)
        };
        let input_name = format!("{id}.input.cfld");
        let expected_name = format!("{id}.expected.cfld");
        write_field(dir.join(&input_name), &input)?;
        write_field(dir.join(&expected_name), &output)?;
        cases.push(GoldenCase {
            params: plan_params(distance, SOURCE_PITCH, dest, shift, &plan),
            id,
            operation: operation.to_string(),
            input: Some(input_name.into()),
            aux: None,
            expected: expected_name.into(),
            metric: "rel_l2".into(),
            tolerance: 1e-4,
        });
        Ok(())
    };

    for &s in &SCALES {
        let dest = s * SOURCE_PITCH;
        for (tag, shift) in [("0", 0.0), ("10pd", 10.0 * dest)] {
            let id = format!("propagate-s{s}-shift{tag}");
            push_prop(&mut cases, id, "propagate", DISTANCE, dest, shift, next_seed())?;
        }
    }
    // lambda*z/(2*p^2) = 10.4 samples: the window clips lags beyond 10.
    push_prop(
        &mut cases,
        "propagate-windowed-s1".into(),
        "propagate",
        2.5e-3,
        SOURCE_PITCH,
        0.0,
        next_seed(),
    )?;
    push_prop(
        &mut cases,
        "propagate-inverse-s5".into(),
        "propagate_inverse",
        DISTANCE,
        5.0 * SOURCE_PITCH,
        0.0,
        next_seed(),
    )?;

    for (tag, offset) in [("centered", 0.0), ("offset", 0.64e-3)] {
        let spec = ConvergentPhaseSpec::new(0.06, Vec2::splat(offset), LAMBDA, Vec2::splat(18.7e-6), (GRID, GRID))?;
        let phase = convergent_phase(&spec)?;
        let id = format!("convergent-phase-{tag}");
        let expected_name = format!("{id}.expected.cfld");
        write_field(dir.join(&expected_name), &real_field(&phase, spec.image_pitch, LAMBDA))?;
        cases.push(GoldenCase {
            id,
            operation: "convergent_phase".into(),
            input: None,
            aux: None,
            expected: expected_name.into(),
            metric: "max_abs".into(),
            tolerance: 1e-9,
            params: vec![
                ("focal_length".into(), num(spec.focal_length)),
                ("offset_x".into(), num(spec.offset.x)),
                ("offset_y".into(), num(spec.offset.y)),
                ("wavelength".into(), num(LAMBDA)),
                ("pitch_x".into(), num(spec.image_pitch.x)),
                ("pitch_y".into(), num(spec.image_pitch.y)),
                ("rows".into(), GRID.to_string()),
                ("cols".into(), GRID.to_string()),
            ],
        });
    }

    for encoding in [Encoding::PhaseOnly, Encoding::Bleached] {
        let input = random_field(GRID, GRID, Vec2::splat(3.74e-6), next_seed());
        let holo = match encoding {
            Encoding::PhaseOnly => encode_phase_only(&input),
            Encoding::Bleached => encode_bleached(&input),
        };
        let id = format!("encode-{encoding}");
        let input_name = format!("{id}.input.cfld");
        let expected_name = format!("{id}.expected.cfld");
        write_field(dir.join(&input_name), &input)?;
        write_field(dir.join(&expected_name), &real_field(holo.phase(), holo.pitch(), LAMBDA))?;
        cases.push(GoldenCase {
            id,
            operation: match encoding {
                Encoding::PhaseOnly => "encode_phase_only".into(),
                Encoding::Bleached => "encode_bleached".into(),
            },
            input: Some(input_name.into()),
            aux: None,
            expected: expected_name.into(),
            metric: "max_abs".into(),
            tolerance: 1e-12,
            params: vec![],
        });
    }

    {
        let id = "gs-3-phase-only".to_string();
        let dest = 0.5 * SOURCE_PITCH;
        let plan = make_plan(DISTANCE, src_pitch, Vec2::splat(dest), LAMBDA, (GRID, GRID), Vec2::ZERO)?;
        let target = RealImage::from_fn_clamped(GRID, GRID, |r, c| {
            let (y, x) = (r as f64 - 16.0, c as f64 - 16.0);
            if x.abs() < 8.0 && y.abs() < 6.0 {
                1.0
            } else {
                0.2 + 0.1 * (x * 0.3).cos()
            }
        });
        let init = random_phase(GRID, GRID, next_seed());
        let cfg = GsConfig {
            iterations: 3,
            encoding: Encoding::PhaseOnly,
            initial_phase: InitialPhase::Explicit(init.clone()),
            record_trace: false,
        };
        let (holo, _) = gs_optimize(&target, &plan, &cfg)?;
        let input_name = format!("{id}.target.cfld");
        let aux_name = format!("{id}.initial-phase.cfld");
        let expected_name = format!("{id}.expected.cfld");
        write_field(dir.join(&input_name), &real_field(target.as_grid(), src_pitch, LAMBDA))?;
        write_field(dir.join(&aux_name), &real_field(&init, src_pitch, LAMBDA))?;
        write_field(dir.join(&expected_name), &real_field(holo.phase(), holo.pitch(), LAMBDA))?;
        let mut params = plan_params(DISTANCE, SOURCE_PITCH, dest, 0.0, &plan);
        params.push(("iterations".into(), "3".into()));
        params.push(("encoding".into(), Encoding::PhaseOnly.to_string()));
        cases.push(GoldenCase {
            id,
            operation: "gs_optimize".into(),
            input: Some(input_name.into()),
            aux: Some(aux_name.into()),
            expected: expected_name.into(),
            metric: "phasor_rel_l2".into(),
            tolerance: 1e-6,
            params,
        });
    }

    let manifest = GoldenManifest { seed, cases };
    fs::write(dir.join(MANIFEST_FILE), manifest.to_text())?;
    manifest.validate(dir)?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayOutcome {
    pub id: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn compare(metric: &str, expected: &ComplexField, got: &ComplexField) -> Result<f64> {
    if expected.shape() != got.shape() {
        return Err(Error::ShapeMismatch {
            expected: expected.shape(),
            actual: got.shape(),
        });
    }
    match metric {
        "rel_l2" => Ok(relative_l2(expected.samples(), got.samples())),
        "max_abs" => Ok(expected
            .samples()
            .iter()
            .zip(got.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)),
        "phasor_rel_l2" => {
            let a: Vec<Complex64> = expected.samples().iter().map(|z| Complex64::cis(z.re)).collect();
            let b: Vec<Complex64> = got.samples().iter().map(|z| Complex64::cis(z.re)).collect();
            Ok(relative_l2(&a, &b))
        }
        other => Err(Error::BadManifest(format!("unknown metric {other:?}"))),
    }
}

fn holo_as_field(holo: &PhaseHologram) -> ComplexField {
    real_field(holo.phase(), holo.pitch(), holo.wavelength())
}

/// Recomputes one case with this engine and compares against the stored output.
pub fn replay_case(case: &GoldenCase, dir: &Path) -> Result<ReplayOutcome> {
    let expected = read_field(dir.join(&case.expected))?;
    let input = || -> Result<ComplexField> {
        let p = case
            .input
            .as_ref()
            .ok_or_else(|| Error::BadManifest(format!("case {} needs an input", case.id)))?;
        read_field(dir.join(p))
    };
    let got = match case.operation.as_str() {
        "propagate" => propagate(&plan_from_params(case)?, &input()?)?,
        "propagate_inverse" => propagate_inverse(&plan_from_params(case)?, &input()?)?,
        "convergent_phase" => {
            let spec = ConvergentPhaseSpec::new(
                case.param_f64("focal_length")?,
                Vec2::new(case.param_f64("offset_x")?, case.param_f64("offset_y")?),
                case.param_f64("wavelength")?,
                Vec2::new(case.param_f64("pitch_x")?, case.param_f64("pitch_y")?),
                (case.param_usize("rows")?, case.param_usize("cols")?),
            )?;
            real_field(&convergent_phase(&spec)?, spec.image_pitch, spec.wavelength)
        }
        "encode_phase_only" => holo_as_field(&encode_phase_only(&input()?)),
        "encode_bleached" => holo_as_field(&encode_bleached(&input()?)),
        "gs_optimize" => {
            let plan = plan_from_params(case)?;
            let target = RealImage::new(real_part(&input()?))?;
            let aux = case
                .aux
                .as_ref()
                .ok_or_else(|| Error::BadManifest(format!("case {} needs an aux initial phase", case.id)))?;
            let init = real_part(&read_field(dir.join(aux))?);
            let cfg = GsConfig {
                iterations: case.param_usize("iterations")?,
                encoding: case.param("encoding")?.parse().map_err(Error::BadManifest)?,
                initial_phase: InitialPhase::Explicit(init),
                record_trace: false,
            };
            holo_as_field(&gs_optimize(&target, &plan, &cfg)?.0)
        }
        other => return Err(Error::BadManifest(format!("unknown operation {other:?}"))),
    };
    let error = compare(&case.metric, &expected, &got)?;
    Ok(ReplayOutcome {
        id: case.id.clone(),
        error,
        tolerance: case.tolerance,
        passed: error <= case.tolerance,
    })
}

pub fn replay_manifest(manifest: &GoldenManifest, dir: &Path) -> Result<Vec<ReplayOutcome>> {
    manifest.cases.iter().map(|c| replay_case(c, dir)).collect()
}
