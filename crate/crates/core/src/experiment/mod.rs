//! Seeded Monte Carlo layer: pulse-pair timing, interferometer path routing,
//! coincidence histograms versus detection delay, windowed peak integration,
//! and end-to-end simulated Bell / tomography runs.
//!
//! Shots are independent and are processed in fixed-size partitions, each on
//! its own derived random stream; results are bit-identical for a given
//! (config, params, setting, seed) regardless of the worker count.

mod config;
mod histogram;
mod simulate;

pub use config::ExperimentConfig;
pub use histogram::{central_window_count, normalized_c, Histogram};
pub use simulate::{run_bell_experiment, run_tomo_experiment, simulate_histogram};

use crate::bell::BellError;
use crate::optics::OpticsError;
use crate::qmath::QmathError;
use crate::tomography::TomoError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("window {window_ns} ns exceeds the histogram half-range {half_range_ns} ns")]
    WindowExceedsRange { window_ns: f64, half_range_ns: f64 },
    #[error("no coincidences inside the normalization window")]
    ZeroNormalization,
    #[error("invalid angle grid: {0}")]
    BadGrid(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Tomo(#[from] TomoError),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}
