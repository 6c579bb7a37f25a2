//! TOML experiment manifests. Every key is optional; command-line flags take
//! precedence over file values, which take precedence over built-in defaults.

use std::path::{Path, PathBuf};

use pds_stretch::paths::PathKind;
use pds_stretch::pixels::Color;
use pds_stretch::sampling::MarginPolicy;
use serde::Deserialize;

use crate::UsageError;

/// A scalar or a list in the file.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Vec<T> {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Subcommand to run when none is given on the command line.
    pub command: Option<String>,
    pub intensity: Option<OneOrMany<f64>>,
    pub k: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub paths: Option<Vec<String>>,
    /// `"default"`, `"corridor"` or a fixed margin such as `"0.5"`.
    pub margin: Option<String>,
    pub rho: Option<OneOrMany<f64>>,
    pub kappa: Option<f64>,
    pub windows: Option<u64>,
    pub half: Option<u64>,
    pub instances: Option<u64>,
    pub polylines: Option<u64>,
    pub samples: Option<u64>,
    pub search: Option<bool>,
    pub unchecked: Option<bool>,
    pub out: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
    pub file: Option<PathBuf>,
    pub scale: Option<u32>,
    pub color: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<FileConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Parses a count written either as an integer or in scientific notation
/// (`1e7`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

pub fn parse_margin(s: &str) -> Result<MarginPolicy, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "default" => Ok(MarginPolicy::Default),
        "corridor" => Ok(MarginPolicy::Corridor),
        other => match other.parse::<f64>() {
            Ok(d) if d > 0.0 && d.is_finite() => Ok(MarginPolicy::Fixed(d)),
            _ => Err(format!("margin must be default, corridor or a positive number, got {s}")),
        },
    }
}

pub fn parse_path(s: &str) -> Result<PathKind, String> {
    PathKind::parse(s).ok_or_else(|| format!("unknown path {s}; expected sw, up, gp or sp"))
}

pub fn parse_color(s: &str) -> Result<Color, String> {
    Color::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s.trim())).ok_or_else(|| format!("unknown color {s}"))
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
