//! CHSH Bell-test mathematics: correlation functions, the S statistic with
//! Poissonian error propagation, predicted coincidence rates from a density
//! matrix, and a QBER estimator.
//!
//! All functions are pure and operate on immutable tables.

mod counts;

pub use counts::{perpendicular, CountTable, TABLE1_QD1_CSV};

use serde::Serialize;
use thiserror::Error;

use crate::optics::polarizer_projector;
use crate::qmath::{tensor_product, DensityMatrix, QmathError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    #[error("missing count for setting ({alpha_deg}°, {beta_deg}°)")]
    MissingEntry { alpha_deg: f64, beta_deg: f64 },
    #[error("correlation denominator is zero")]
    ZeroDenominator,
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("duplicate setting ({alpha_deg}°, {beta_deg}°)")]
    DuplicateSetting { alpha_deg: f64, beta_deg: f64 },
    #[error("count must be finite and nonnegative, got {0}")]
    BadCount(f64),
    #[error("analyzer angles must be finite")]
    BadAngle,
    #[error("count scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// A pair of analyzer angles, one per detected arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleSetting {
    pub alpha_deg: f64,
    pub beta_deg: f64,
}

impl AngleSetting {
    pub fn new(alpha_deg: f64, beta_deg: f64) -> Self {
        AngleSetting {
            alpha_deg,
            beta_deg,
        }
    }
}

/// Correlation function
/// E = [C(α,β) + C(α⊥,β⊥) − C(α⊥,β) − C(α,β⊥)] / [sum of the four]
/// with the perpendicular settings at +90° mod 180°.
///
/// The returned standard deviation treats every count as an independent
/// Poisson variable with variance equal to the count:
/// σ_E = 2√(A·B·(A+B)) / (A+B)² with A, B the aligned and crossed sums.
pub fn correlation_e(
    table: &CountTable,
    alpha_deg: f64,
    beta_deg: f64,
) -> Result<(f64, f64), BellError> {
    let alpha_perp = perpendicular(alpha_deg);
    let beta_perp = perpendicular(beta_deg);
    let aligned =
        table.require(alpha_deg, beta_deg)? + table.require(alpha_perp, beta_perp)?;
    let crossed =
        table.require(alpha_perp, beta_deg)? + table.require(alpha_deg, beta_perp)?;
    let total = aligned + crossed;
    if total <= 0.0 {
        return Err(BellError::ZeroDenominator);
    }
    let e = (aligned - crossed) / total;
    let sigma = 2.0 * (aligned * crossed * total).sqrt() / (total * total);
    Ok((e, sigma))
}

/// Result of a CHSH evaluation.
///
/// `e_values` are [E(α,β), E(α′,β), E(α′,β′), E(α,β′)];
/// S = |E(α,β) − E(α′,β)| + |E(α′,β′) + E(α,β′)| ≤ 2 under local realism.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshResult {
    pub s: f64,
    pub sigma_s: f64,
    pub e_values: [f64; 4],
    pub e_sigmas: [f64; 4],
    /// (S − 2) / σ_S; positive means violation.
    pub violation_sigmas: f64,
}

impl ChshResult {
    pub fn violates(&self) -> bool {
        self.s > 2.0
    }
}

/// Evaluate the CHSH statistic on the angle quadruple (α, α′, β, β′).
/// Needs all 16 combinations of {α,α⊥,α′,α′⊥} × {β,β⊥,β′,β′⊥} in the table.
pub fn chsh_s(
    table: &CountTable,
    alpha_deg: f64,
    alpha_prime_deg: f64,
    beta_deg: f64,
    beta_prime_deg: f64,
) -> Result<ChshResult, BellError> {
    let (e1, s1) = correlation_e(table, alpha_deg, beta_deg)?;
    let (e2, s2) = correlation_e(table, alpha_prime_deg, beta_deg)?;
    let (e3, s3) = correlation_e(table, alpha_prime_deg, beta_prime_deg)?;
    let (e4, s4) = correlation_e(table, alpha_deg, beta_prime_deg)?;
    let s = (e1 - e2).abs() + (e3 + e4).abs();
    let sigma_s = (s1 * s1 + s2 * s2 + s3 * s3 + s4 * s4).sqrt();
    let violation_sigmas = if sigma_s > 0.0 {
        (s - 2.0) / sigma_s
    } else if s > 2.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(ChshResult {
        s,
        sigma_s,
        e_values: [e1, e2, e3, e4],
        e_sigmas: [s1, s2, s3, s4],
        violation_sigmas,
    })
}

/// Expected coincidence count N_quad · tr[ρ (P_α ⊗ P_β)] where P_θ projects
/// onto linear polarization at θ and N_quad is the total over the four
/// complementary settings; those four predictions sum to N_quad exactly.
pub fn predicted_counts(
    rho: &DensityMatrix,
    alpha_deg: f64,
    beta_deg: f64,
    n_quad: f64,
) -> Result<f64, BellError> {
    if !(n_quad > 0.0) {
        return Err(BellError::NonPositiveScale(n_quad));
    }
    if !alpha_deg.is_finite() || !beta_deg.is_finite() {
        return Err(BellError::BadAngle);
    }
    let projector = tensor_product(
        &polarizer_projector(alpha_deg),
        &polarizer_projector(beta_deg),
    );
    let probability = rho.expectation(&projector)?;
    Ok(n_quad * probability.max(0.0))
}

/// Fill a table with predicted counts for every combination the CHSH
/// quadruple (α, α′, β, β′) needs, each complementary quadruple carrying
/// `n_quad` counts in total.
pub fn predicted_table(
    rho: &DensityMatrix,
    alpha_deg: f64,
    alpha_prime_deg: f64,
    beta_deg: f64,
    beta_prime_deg: f64,
    n_quad: f64,
) -> Result<CountTable, BellError> {
    let mut table = CountTable::new();
    for &alpha in &[
        alpha_deg,
        perpendicular(alpha_deg),
        alpha_prime_deg,
        perpendicular(alpha_prime_deg),
    ] {
        for &beta in &[
            beta_deg,
            perpendicular(beta_deg),
            beta_prime_deg,
            perpendicular(beta_prime_deg),
        ] {
            if table.get(alpha, beta).is_some() {
                continue; // settings may coincide mod 180
            }
            table.insert(alpha, beta, predicted_counts(rho, alpha, beta, n_quad)?)?;
        }
    }
    Ok(table)
}

/// Probability of a same-polarization coincidence in the basis rotated by
/// `basis_deg`: tr[ρ (P_θ⊗P_θ + P_θ⊥⊗P_θ⊥)]. These are the error events for
/// keys carried by anticorrelated pairs.
pub fn qber_estimate(rho: &DensityMatrix, basis_deg: f64) -> Result<f64, BellError> {
    if !basis_deg.is_finite() {
        return Err(BellError::BadAngle);
    }
    let p = polarizer_projector(basis_deg);
    let p_perp = polarizer_projector(perpendicular(basis_deg));
    let same = &tensor_product(&p, &p) + &tensor_product(&p_perp, &p_perp);
    Ok(rho.expectation(&same)?.clamp(0.0, 1.0))
}
