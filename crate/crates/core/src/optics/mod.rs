//! Amplitude-level simulation of the source and the linear-optics network.
//!
//! Fock states live over labeled modes (spatial port × polarization ×
//! internal wavepacket identity). The beam splitter acts by substituting
//! creation operators, the imperfect source is a weighted ensemble over
//! such states, and coincidence post-selection reduces everything to a
//! two-qubit polarization density matrix.
//!
//! Everything here is a pure value transformation; no shared mutable state.

mod beamsplitter;
mod fock;
mod jones;
mod mode;
mod model;
mod source;

pub use beamsplitter::{apply_beamsplitter, beamsplitter_matrix};
pub use fock::{BosonicState, FockBasisState, WeightedEnsemble, MAX_TOTAL_PHOTONS};
pub use jones::{jones_element, polarizer_projector, JonesElement, JonesKind};
pub use mode::{Internal, ModeLabel, Pol, Spatial};
pub use model::{oracle_rho, rho_model};
pub use source::{hom_coincidence_prob, postselect_coincidence, prepare_source_pair, SourceParams};

use crate::qmath::QmathError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("angle must be finite")]
    NonFiniteAngle,
    #[error("unknown optical element kind '{0}'")]
    UnknownElementKind(String),
    #[error("reflectance must lie strictly between 0 and 1, got {0}")]
    ReflectanceOutOfRange(f64),
    #[error("overlap must lie in [0, 1], got {0}")]
    OverlapOutOfRange(f64),
    #[error("g2 must be finite and nonnegative, got {0}")]
    G2OutOfRange(f64),
    #[error("two-photon weight 2w2 = {0:.4} exceeds 0.5; g2 is too large for the low-pump model")]
    PumpTooStrong(f64),
    #[error("photon count {total} exceeds the cap of {max}")]
    TooManyPhotons { total: u32, max: u32 },
    #[error("state already occupies output port {0:?} before the transform")]
    OccupiedOutputMode(Spatial),
    #[error("state occupies port {0:?}, which is neither input of the transform")]
    UnexpectedOccupation(Spatial),
    #[error("beam splitter ports must be pairwise distinct")]
    DegenerateModePair,
    #[error("ensemble weights must be nonnegative and sum to 1, got sum {0}")]
    BadEnsembleWeights(f64),
    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("post-selection has vanishing success probability")]
    DegeneratePostselection,
    #[error(transparent)]
    Qmath(#[from] QmathError),
}
