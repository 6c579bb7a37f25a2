//! Seeded Monte Carlo experiments, theorem property checks and CSV/SVG
//! output. Every result is a function of the configuration and its master
//! seed: trial `i` draws from `mix_seed(master, i)` and results are merged by
//! trial index, so the worker count does not matter.

mod emit;
mod experiments;
mod pixel_study;
mod stats;
mod theorems;

pub use emit::{
    band_plot_svg, integral_rows_csv, path_rows, paths_csv, theorem_rows_csv, write_file, BandPoint, PathRow,
};
pub use experiments::{
    circumdisks_containing, estimate_l0, estimate_n0, origin_half_width, run_path_experiment, variance_study,
    ExperimentConfig, L0Estimate, PathExperiment, PathMeasure, PathSummary, TrialRecord, VarianceRow, VarianceStudy,
};
pub use pixel_study::{pixel_study, PixelStudyConfig, PixelStudyRow};
pub use stats::{pairwise_sum, StatSummary};
pub use theorems::{random_lattice_polyline, theorem_checks, CheckRow, TheoremConfig, TheoremReport};

use thiserror::Error;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PDS_STRETCH_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trial {index} (seed {seed}) failed: {message}")]
    Trial { index: usize, seed: u64, message: String },
    #[error(transparent)]
    Pixel(#[from] crate::pixels::PixelError),
    #[error(transparent)]
    Bounds(#[from] crate::bounds::BoundsError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Worker count from `PDS_STRETCH_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Configures the global rayon pool from `PDS_STRETCH_THREADS`. Has no
/// effect if the pool was already initialized.
pub fn init_thread_pool() {
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
