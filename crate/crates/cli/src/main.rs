//! `holo`: generate, optimize, reconstruct and score scaled phase holograms.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "holo", version, about = "Scaled-diffraction phase hologram toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Run settings; lengths accept nm, um, µm, mm, cm or m suffixes (bare numbers are metres).
#[derive(Args, Default)]
struct Settings {
    /// `key = value` file applied before the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    wavelength: Option<String>,
    #[arg(long)]
    holo_pitch: Option<String>,
    #[arg(long)]
    image_pitch: Option<String>,
    /// Image-to-hologram distance
    #[arg(long)]
    distance: Option<String>,
    /// Convergent-wave axis offset on the image plane
    #[arg(long, allow_hyphen_values = true)]
    offset_x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    offset_y: Option<String>,
    /// Samples per side; input images are resized to it
    #[arg(long)]
    grid: Option<String>,
    /// phase-only | bleached
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// random | convergent
    #[arg(long)]
    init: Option<String>,
    /// amplitude | intensity
    #[arg(long)]
    render: Option<String>,
}

impl Settings {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("wavelength", &self.wavelength),
            ("holo-pitch", &self.holo_pitch),
            ("image-pitch", &self.image_pitch),
            ("distance", &self.distance),
            ("offset-x", &self.offset_x),
            ("offset-y", &self.offset_y),
            ("grid", &self.grid),
            ("encoding", &self.encoding),
            ("iterations", &self.iterations),
            ("seed", &self.seed),
            ("init", &self.init),
            ("render", &self.render),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Image -> initial phase -> one scaled propagation -> encoded hologram PNG (+ sidecar)
    Generate {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Gerchberg-Saxton refinement; also writes an `iteration,residual` trace CSV
    Gs {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Trace CSV path (default: `<out stem>.trace.csv`)
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Back-propagates a hologram PNG to an 8-bit image; pitch, wavelength and grid come from the sidecar
    Reconstruct {
        hologram: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// PSNR and SSIM of a test image against a reference
    Metrics { reference: PathBuf, test: PathBuf },
    /// Generates and reconstructs at image pitch = ratio * hologram pitch; writes `index.csv` (ratio,f_i,psnr,ssim)
    ZoomSweep {
        image: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// `a..b:step` or a comma-separated list
        #[arg(long, default_value = "2..5:0.25")]
        ratios: String,
        #[command(flatten)]
        settings: Settings,
    },
    /// Writes the golden-vector suite, or replays it with --check
    Goldens {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Replay the manifest already in --out instead of writing one
        #[arg(long)]
        check: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { image, out, settings } => commands::generate_cmd(&image, &out, &settings.resolve()?),
        Command::Gs {
            image,
            out,
            trace,
            settings,
        } => commands::gs_cmd(&image, &out, trace.as_deref(), &settings.resolve()?),
        Command::Reconstruct { hologram, out, settings } => {
            commands::reconstruct_cmd(&hologram, &out, &settings.resolve()?)
        }
        Command::Metrics { reference, test } => commands::metrics_cmd(&reference, &test),
        Command::ZoomSweep {
            image,
            out,
            ratios,
            settings,
        } => {
            let ratios = commands::parse_ratios(&ratios).map_err(CliError::Usage)?;
            commands::zoom_sweep_cmd(&image, &out, &ratios, &settings.resolve()?)
        }
        Command::Goldens { out, seed, check } => commands::goldens_cmd(&out, seed, check),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
