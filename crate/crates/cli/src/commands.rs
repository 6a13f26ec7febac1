use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use holo_core::io::{
    emit_goldens, load_gray8, load_image_resized, load_manifest, read_hologram_png, replay_manifest, save_gray8,
    write_hologram_png,
};
use holo_core::metrics::evaluate;
use holo_core::{
    generate, gs_optimize, reconstruct, Geometry, GsConfig, InitialPhase, PhaseHologram, RealImage, SsimParams,
};
use rayon::prelude::*;

use crate::config::{InitKind, RunConfig};
use crate::error::CliError;

type CmdResult = Result<(), CliError>;

fn load_target(path: &Path, cfg: &RunConfig) -> Result<RealImage, CliError> {
    Ok(load_image_resized(path, Some(cfg.grid))?)
}

fn initial_phase(geometry: &Geometry, cfg: &RunConfig) -> Result<InitialPhase, CliError> {
    Ok(match cfg.init {
        InitKind::Random => InitialPhase::Random { seed: cfg.seed },
        InitKind::Convergent => InitialPhase::Convergent(geometry.convergent_spec()?),
    })
}

fn ensure_parent(path: &Path) -> CmdResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display()))),
        _ => Ok(()),
    }
}

pub fn generate_cmd(image: &Path, out: &Path, cfg: &RunConfig) -> CmdResult {
    let geometry = cfg.geometry();
    let plan = geometry.plan()?;
    let target = load_target(image, cfg)?;
    let holo = generate(&target, &plan, &initial_phase(&geometry, cfg)?, cfg.encoding)?;
    ensure_parent(out)?;
    write_hologram_png(out, &holo)?;
    println!("wrote {}", out.display());
    Ok(())
}

/// `holo.png` -> `holo.trace.csv` next to it.
pub fn default_trace_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "hologram".into());
    out.with_file_name(format!("{stem}.trace.csv"))
}

pub fn gs_cmd(image: &Path, out: &Path, trace: Option<&Path>, cfg: &RunConfig) -> CmdResult {
    let geometry = cfg.geometry();
    let plan = geometry.plan()?;
    let target = load_target(image, cfg)?;
    let gs_cfg = GsConfig {
        iterations: cfg.iterations,
        encoding: cfg.encoding,
        initial_phase: initial_phase(&geometry, cfg)?,
        record_trace: true,
    };
    let (holo, gs_trace) = gs_optimize(&target, &plan, &gs_cfg)?;
    ensure_parent(out)?;
    write_hologram_png(out, &holo)?;

    let mut csv = String::from("iteration,residual\n");
    for (i, r) in gs_trace.residuals.iter().enumerate() {
        writeln!(csv, "{},{r:.12e}", i + 1).unwrap();
    }
    let trace_path = trace.map(Path::to_path_buf).unwrap_or_else(|| default_trace_path(out));
    ensure_parent(&trace_path)?;
    fs::write(&trace_path, csv).map_err(|e| CliError::Io(format!("{}: {e}", trace_path.display())))?;
    println!("wrote {} and {}", out.display(), trace_path.display());
    Ok(())
}

/// Geometry of a stored hologram: pitch, wavelength and grid from its sidecar, the rest from `cfg`.
fn hologram_geometry(holo: &PhaseHologram, cfg: &RunConfig) -> Result<Geometry, CliError> {
    let (rows, cols) = holo.shape();
    if rows != cols {
        return Err(CliError::Validation(format!("hologram is {rows}x{cols}; only square grids are supported")));
    }
    let pitch = holo.pitch();
    if pitch.x != pitch.y {
        return Err(CliError::Validation(format!("hologram pitch {} x {} is not square", pitch.x, pitch.y)));
    }
    Ok(Geometry {
        wavelength: holo.wavelength(),
        holo_pitch: pitch.x,
        grid: rows,
        ..cfg.geometry()
    })
}

pub fn reconstruct_cmd(hologram: &Path, out: &Path, cfg: &RunConfig) -> CmdResult {
    let holo = read_hologram_png(hologram)?;
    let plan = hologram_geometry(&holo, cfg)?.plan()?;
    let image = reconstruct(&holo, &plan, cfg.render)?;
    ensure_parent(out)?;
    save_gray8(out, &image)?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn metrics_cmd(reference: &Path, test: &Path) -> CmdResult {
    let a = load_gray8(reference)?;
    let b = load_gray8(test)?;
    let report = evaluate(&a, &b, &SsimParams::default())?;
    println!("reference {} vs {}", reference.display(), test.display());
    println!("PSNR={:.6} SSIM={:.6}", report.psnr_db, report.ssim);
    Ok(())
}

/// Parses `a..b:step` (inclusive) or a comma-separated list.
pub fn parse_ratios(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("cannot parse ratio {t:?}"));
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or_else(|| format!("expected a..b:step, got {s:?}"))?;
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if !(step > 0.0) || hi < lo {
            return Err(format!("empty ratio range {s:?}"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| lo + i as f64 * step).collect());
    }
    s.split(',').map(num).collect()
}

struct SweepRow {
    ratio: f64,
    focal_length: f64,
    psnr: f64,
    ssim: f64,
}

fn sweep_one(target: &RealImage, ratio: f64, dir: &Path, cfg: &RunConfig) -> Result<SweepRow, CliError> {
    let geometry = Geometry {
        image_pitch: ratio * cfg.holo_pitch,
        ..cfg.geometry()
    };
    let focal_length = geometry.focal_length()?;
    let plan = geometry.plan()?;
    let holo = generate(target, &plan, &initial_phase(&geometry, cfg)?, cfg.encoding)?;
    let image = reconstruct(&holo, &plan, cfg.render)?;
    let report = evaluate(&target.to_gray8(), &image, &SsimParams::default())?;
    write_hologram_png(dir.join(format!("holo_r{ratio:.2}.png")), &holo)?;
    save_gray8(dir.join(format!("recon_r{ratio:.2}.png")), &image)?;
    Ok(SweepRow {
        ratio,
        focal_length,
        psnr: report.psnr_db,
        ssim: report.ssim,
    })
}

pub fn zoom_sweep_cmd(image: &Path, dir: &Path, ratios: &[f64], cfg: &RunConfig) -> CmdResult {
    let target = load_target(image, cfg)?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let results: Vec<_> = ratios.par_iter().map(|&r| (r, sweep_one(&target, r, dir, cfg))).collect();

    let mut csv = String::from("ratio,f_i,psnr,ssim\n");
    let mut written = 0;
    for (ratio, result) in results {
        match result {
            Ok(row) => {
                eprintln!("ratio {}: f_i = {:.6} m", row.ratio, row.focal_length);
                writeln!(csv, "{},{},{:.6},{:.6}", row.ratio, row.focal_length, row.psnr, row.ssim).unwrap();
                written += 1;
            }
            Err(e @ CliError::Validation(_)) => eprintln!("warning: skipping ratio {ratio}: {e}"),
            Err(e) => return Err(e),
        }
    }
    let index = dir.join("index.csv");
    fs::write(&index, csv).map_err(|e| CliError::Io(format!("{}: {e}", index.display())))?;
    println!("wrote {written} ratios to {}", dir.display());
    Ok(())
}

pub fn goldens_cmd(dir: &Path, seed: u64, check: bool) -> CmdResult {
    if !check {
        let manifest = emit_goldens(dir, seed)?;
        println!("wrote {} golden cases to {}", manifest.cases.len(), dir.display());
        return Ok(());
    }
    let manifest = load_manifest(dir)?;
    manifest.validate(dir)?;
    let outcomes = replay_manifest(&manifest, dir)?;
    let mut failed = 0;
    for o in &outcomes {
        let verdict = if o.passed { "ok" } else { "FAILED" };
        println!("{:<32} {verdict:<6} error {:.3e} (tolerance {:.1e})", o.id, o.error, o.tolerance);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} of {} golden cases failed", outcomes.len())));
    }
    Ok(())
}
