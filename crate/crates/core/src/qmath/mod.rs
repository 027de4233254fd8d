//! Dense complex-matrix primitives specialized for two-qubit polarization
//! states: validation, composition, partial transpose, negativity, fidelity.
//!
//! All types are immutable values after construction and all operations are
//! pure functions, so everything here is safe to share across threads.

mod density;
mod entanglement;
mod matrix;

pub use density::{validate_density, DensityMatrix, PureState2Q, PHYSICALITY_TOL, TWO_QUBIT_BASIS};
pub use entanglement::{fidelity, negativity, partial_transpose};
pub use matrix::{c64, tensor_product, ComplexMatrix, C64};

use thiserror::Error;

/// A single physicality check failure, carrying the offending magnitude.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("not Hermitian: max entrywise |m - m^†| = {0:.3e}")]
    NotHermitian(f64),
    #[error("trace deviation |tr - 1| = {0:.3e}")]
    TraceDeviation(f64),
    #[error("negative eigenvalue {0:.3e} beyond tolerance")]
    NegativeEigenvalue(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmathError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("rows have inconsistent lengths")]
    RaggedRows,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Dimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrices have mismatched dimensions: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("state vector norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("not a valid density matrix: {}", format_violations(.0))]
    InvalidDensity(Vec<Violation>),
    #[error("JSON form invalid: {0}")]
    Json(String),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
