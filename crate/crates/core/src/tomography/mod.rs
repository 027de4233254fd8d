//! Two-qubit polarization state reconstruction from 16 projective
//! measurement counts: the measurement frame, linear inversion, and
//! maximum-likelihood estimation.
//!
//! Reconstruction is single-threaded per call; concurrent reconstructions
//! share no state. Randomness belongs to count sampling in callers, never to
//! the estimators themselves.

mod inversion;
mod mle;
mod settings;

pub use inversion::linear_inversion;
pub use mle::{mle_reconstruct, MleOptions, MleOutcome, MleProblem};
pub use settings::{
    canonical_settings, expected_probabilities, setting_projector, Analyzer, TomoCounts,
    TomoSetting,
};

use crate::qmath::QmathError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomoError {
    #[error("total counts must be positive over the {{HH,HV,VV,VH}} subgroup")]
    ZeroTotalCounts,
    #[error("measurement frame is singular")]
    SingularFrame,
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("duplicate setting {0}")]
    DuplicateSetting(String),
    #[error("missing setting {0}")]
    MissingSetting(String),
    #[error("setting {0} is not in the canonical 16-setting frame")]
    NotCanonical(String),
    #[error("count must be finite and nonnegative, got {0}")]
    BadCount(f64),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}
