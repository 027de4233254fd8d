//! Simulation and analysis toolkit for polarization entanglement created from
//! two independent single photons colliding on a non-polarizing beam splitter,
//! with coincidence post-selection.
//!
//! The crate is organized around the stages of such an experiment:
//!
//! - [`qmath`] — dense complex-matrix primitives for two-qubit polarization
//!   states: validation, tensor products, partial transpose, negativity,
//!   Uhlmann fidelity.
//! - [`optics`] — amplitude-level simulation of the source and the linear
//!   optics network: bosonic Fock states over labeled modes, beam splitter
//!   and wave-plate transforms, the imperfect-source model, post-selection,
//!   and the closed-form model density matrix with its brute-force oracle.
//! - [`bell`] — CHSH mathematics: correlation functions, the S statistic with
//!   Poissonian error propagation, predicted coincidence rates, and a QBER
//!   estimator for entanglement-based key distribution.
//! - [`tomography`] — two-qubit state reconstruction from 16 projective
//!   measurement counts: linear inversion and maximum-likelihood estimation.
//! - [`experiment`] — seeded Monte Carlo layer producing coincidence
//!   histograms versus detection delay, windowed peak integration, and
//!   end-to-end simulated Bell / tomography runs.

pub mod bell;
pub mod experiment;
pub mod numfmt;
pub mod optics;
pub mod qmath;
pub mod tomography;
