//! Run configuration: defaults, `key = value` config files and unit-suffixed quantities.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use holo_core::{Encoding, Geometry, Rendering, Vec2};

use crate::error::CliError;

/// Initial object phase for generation and GS.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Random,
    Convergent,
}

impl FromStr for InitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(InitKind::Random),
            "convergent" => Ok(InitKind::Convergent),
            other => Err(format!("unknown init {other:?} (expected random or convergent)")),
        }
    }
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitKind::Random => "random",
            InitKind::Convergent => "convergent",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub wavelength: f64,
    pub holo_pitch: f64,
    pub image_pitch: f64,
    pub distance: f64,
    pub offset_x: f64,
    pub offset_y: f64,
    pub grid: usize,
    pub encoding: Encoding,
    pub iterations: usize,
    pub seed: u64,
    pub init: InitKind,
    pub render: Rendering,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = Geometry::reference();
        Self {
            wavelength: g.wavelength,
            holo_pitch: g.holo_pitch,
            image_pitch: g.image_pitch,
            distance: g.distance,
            offset_x: g.offset.x,
            offset_y: g.offset.y,
            grid: g.grid,
            encoding: Encoding::PhaseOnly,
            iterations: 10,
            seed: 1,
            init: InitKind::Convergent,
            render: Rendering::Amplitude,
        }
    }
}

impl RunConfig {
    pub fn geometry(&self) -> Geometry {
        Geometry {
            wavelength: self.wavelength,
            holo_pitch: self.holo_pitch,
            image_pitch: self.image_pitch,
            distance: self.distance,
            offset: Vec2::new(self.offset_x, self.offset_y),
            grid: self.grid,
        }
    }

    /// Applies one `key = value` setting. Keys are the long flag names; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |e: String| CliError::Usage(format!("{key}: {e}"));
        match key.replace('_', "-").as_str() {
            "wavelength" => self.wavelength = parse_length(value).map_err(bad)?,
            "holo-pitch" => self.holo_pitch = parse_length(value).map_err(bad)?,
            "image-pitch" => self.image_pitch = parse_length(value).map_err(bad)?,
            "distance" => self.distance = parse_length(value).map_err(bad)?,
            "offset-x" => self.offset_x = parse_length(value).map_err(bad)?,
            "offset-y" => self.offset_y = parse_length(value).map_err(bad)?,
            "grid" => self.grid = parse_plain(value).map_err(bad)?,
            "encoding" => self.encoding = value.parse().map_err(bad)?,
            "iterations" => self.iterations = parse_plain(value).map_err(bad)?,
            "seed" => self.seed = parse_plain(value).map_err(bad)?,
            "init" => self.init = value.parse().map_err(bad)?,
            "render" => self.render = value.parse().map_err(bad)?,
            _ => return Err(CliError::Usage(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Applies every setting of a config file on top of `self`.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
            .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| CliError::Usage(format!("line {}: {}", lineno + 1, e.message())))?;
        }
        Ok(())
    }
}

fn parse_plain<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

const UNITS: [(&str, i32); 6] = [("nm", -9), ("um", -6), ("µm", -6), ("mm", -3), ("cm", -2), ("m", 0)];

/// Parses a length in metres; accepts a bare number or one suffixed with nm, um, µm, mm, cm or m.
///
/// A plain decimal mantissa gets the unit folded into its exponent before
/// parsing, so `3.74um` is the same double as `3.74e-6`.
pub fn parse_length(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (number, exp) = UNITS
        .iter()
        .find_map(|&(suffix, e)| s.strip_suffix(suffix).map(|n| (n.trim_end(), e)))
        .unwrap_or((s, 0));
    let err = || format!("cannot parse length {s:?}");
    let v: f64 = if exp == 0 {
        number.parse().map_err(|_| err())?
    } else if number.contains(['e', 'E']) {
        number.parse::<f64>().map_err(|_| err())? * 10f64.powi(exp)
    } else {
        number.parse::<f64>().map_err(|_| err())?;
        format!("{number}e{exp}").parse().map_err(|_| err())?
    };
    if !v.is_finite() {
        return Err(format!("length {s:?} is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_reference_setup() {
        let c = RunConfig::default();
        assert_eq!(c.wavelength, 532e-9);
        assert_eq!(c.holo_pitch, 3.74e-6);
        assert_eq!(c.image_pitch, 18.7e-6);
        assert_eq!(c.distance, 0.5);
        assert_eq!((c.offset_x, c.offset_y), (20.48e-3, 20.48e-3));
        assert_eq!(c.grid, 1024);
        assert_eq!(c.geometry(), Geometry::reference());
    }

    #[test]
    fn unit_suffixes() {
        assert_eq!(parse_length("532nm").unwrap(), 532e-9);
        assert_eq!(parse_length("3.74um").unwrap(), 3.74e-6);
        assert_eq!(parse_length("3.74 µm").unwrap(), 3.74e-6);
        assert_eq!(parse_length("5um").unwrap(), 5e-6);
        assert_eq!(parse_length("20.48mm").unwrap(), 20.48e-3);
        assert!((parse_length("1.5e2um").unwrap() - 1.5e-4).abs() < 1e-18);
        assert_eq!(parse_length("0.5m").unwrap(), 0.5);
        assert_eq!(parse_length("-0.25").unwrap(), -0.25);
        assert_eq!(parse_length("1e-3").unwrap(), 1e-3);
        assert!(parse_length("5 furlongs").is_err());
        assert!(parse_length("mm").is_err());
        assert!(parse_length("inf").is_err());
    }

    #[test]
    fn file_settings_and_comments() {
        let mut c = RunConfig::default();
        c.apply_text("# desk run\ngrid = 256\ndistance = 125mm  # scaled\nholo_pitch = 8um\ninit = random\n")
            .unwrap();
        assert_eq!(c.grid, 256);
        assert_eq!(c.distance, 0.125);
        assert_eq!(c.holo_pitch, 8e-6);
        assert_eq!(c.init, InitKind::Random);
        assert!(c.apply_text("grid 256").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("encoding = hologram").is_err());
    }
}
