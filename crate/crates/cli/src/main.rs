//! Command-line front end. Exit status: 0 on success, 1 when a check fails
//! or a run aborts, 2 on a usage or configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_color, parse_count, parse_margin, parse_path, FileConfig};
use pds_stretch::paths::PathKind;
use pds_stretch::pixels::Color;
use pds_stretch::sampling::MarginPolicy;

/// A bad flag, value or configuration file.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Whether every check of a command passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pds-stretch", version, about = "Path stretch in Poisson-Delaunay triangulations")]
pub struct Cli {
    /// TOML file with default values for the flags; `command` selects the
    /// subcommand when none is given.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Path lengths and sizes over random instances (SW, UP, GP, SP).
    Simulate(SimulateArgs),
    /// Mean number of edges crossing [s,t], against 64/(3π²)·√n.
    WalkCount(WalkCountArgs),
    /// Mean number of triangles whose circumdisk contains the origin.
    N0(OriginArgs),
    /// Mean total length of the edges at the origin, scaled by √n.
    L0(OriginArgs),
    /// Variance of the upper-path length across intensities.
    Variance(VarianceArgs),
    /// Monte Carlo frequency of bad pixels against the closed-form bound.
    Pixels(PixelsArgs),
    /// Deterministic property suite on random instances and polylines.
    Theorems(TheoremsArgs),
    /// Closed-form integrals against quadrature and Monte Carlo.
    Integrals(IntegralsArgs),
    /// Evaluate the bad-pixel bound and optimize the stretch improvement.
    Bound(BoundArgs),
    /// Lattice animal of a polyline read from a file.
    Animal(AnimalArgs),
}

impl Command {
    /// The subcommand with every flag unset.
    fn empty(name: &str) -> Option<Command> {
        Some(match name {
            "simulate" => Command::Simulate(SimulateArgs::default()),
            "walk-count" => Command::WalkCount(WalkCountArgs::default()),
            "n0" => Command::N0(OriginArgs::default()),
            "l0" => Command::L0(OriginArgs::default()),
            "variance" => Command::Variance(VarianceArgs::default()),
            "pixels" => Command::Pixels(PixelsArgs::default()),
            "theorems" => Command::Theorems(TheoremsArgs::default()),
            "integrals" => Command::Integrals(IntegralsArgs::default()),
            "bound" => Command::Bound(BoundArgs::default()),
            "animal" => Command::Animal(AnimalArgs::default()),
            _ => return None,
        })
    }
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    /// Intensities, comma separated (e.g. 1e4,1e5).
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    /// Distance between s and t.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Paths to run, comma separated: sw, up, gp, sp.
    #[arg(long, value_delimiter = ',', value_parser = parse_path)]
    pub paths: Option<Vec<PathKind>>,
    /// Window margin: default, corridor, or a number.
    #[arg(long, value_parser = parse_margin)]
    pub margin: Option<MarginPolicy>,
    /// CSV output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for mean ± std plots against n, one per metric.
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct WalkCountArgs {
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct OriginArgs {
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct VarianceArgs {
    /// At least two intensities, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct PixelsArgs {
    #[arg(long = "n")]
    pub n: Option<f64>,
    /// Values of ρ, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_count)]
    pub windows: Option<u64>,
    /// Half-width of each square window.
    #[arg(long, value_parser = parse_count)]
    pub half: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct TheoremsArgs {
    #[arg(long = "n")]
    pub n: Option<f64>,
    /// Integer distance between s and t.
    #[arg(long, value_parser = parse_count)]
    pub k: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    pub instances: Option<u64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub polylines: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct IntegralsArgs {
    /// Monte Carlo samples per angular integral.
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct BoundArgs {
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Also search for the best (ρ, n).
    #[arg(long)]
    pub search: bool,
    /// Evaluate the formula even when ρ is outside its proven range.
    #[arg(long)]
    pub unchecked: bool,
}

#[derive(Args, Debug, Default)]
pub struct AnimalArgs {
    /// Polyline file: one `x y` or `x,y` vertex per line; `#` starts a comment.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Grid scale.
    #[arg(long)]
    pub scale: Option<u32>,
    /// Grid color: green, pink, blue or yellow.
    #[arg(long, value_parser = parse_color)]
    pub color: Option<Color>,
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let command = match cli.command {
        Some(c) => c,
        None => {
            let name = file.command.clone().ok_or_else(|| UsageError("no subcommand given (see --help)".into()))?;
            Command::empty(&name).ok_or_else(|| UsageError(format!("unknown command {name} in the configuration file")))?
        }
    };
    commands::dispatch(command, &file)
}

fn main() -> ExitCode {
    pds_stretch::harness::init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
