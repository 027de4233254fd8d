use super::density::DensityMatrix;
use super::matrix::ComplexMatrix;
use super::QmathError;

/// Transpose the second qubit's indices: ρ'_(ij),(kl) = ρ_(il),(kj).
///
/// Preserves trace and Hermiticity and is an involution. Requires dim 4.
pub fn partial_transpose(rho: &DensityMatrix) -> Result<ComplexMatrix, QmathError> {
    let m = rho.matrix();
    if rho.dim() != 4 {
        return Err(QmathError::Dimension {
            expected: 4,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    ComplexMatrix::from_fn(4, 4, |r, c| {
        let (i, j) = (r / 2, r % 2);
        let (k, l) = (c / 2, c % 2);
        m.get(2 * i + l, 2 * k + j)
    })
}

/// Entanglement negativity 2·|Σ negative eigenvalues of ρ^{T_B}|, normalized
/// so a maximally entangled two-qubit state scores exactly 1. Zero for every
/// state with positive partial transpose (all separable two-qubit states).
pub fn negativity(rho: &DensityMatrix) -> Result<f64, QmathError> {
    let pt = partial_transpose(rho)?;
    let eigenvalues = pt.hermitian_eigenvalues()?;
    let negative_sum: f64 = eigenvalues.iter().filter(|&&v| v < 0.0).sum();
    Ok((2.0 * negative_sum.abs()).clamp(0.0, 1.0))
}

/// Uhlmann fidelity tr√(√ρ₁ ρ₂ √ρ₁): symmetric, in [0,1], and 1 exactly when
/// the states coincide. Non-PSD inputs beyond tolerance cannot occur here
/// because [`DensityMatrix`] construction already rejects them.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64, QmathError> {
    if rho1.dim() != rho2.dim() {
        return Err(QmathError::ShapeMismatch(
            rho1.dim(),
            rho1.dim(),
            rho2.dim(),
            rho2.dim(),
        ));
    }
    let sqrt1 = rho1.matrix().hermitian_sqrt()?;
    let inner = &(&sqrt1 * rho2.matrix()) * &sqrt1;
    let eigenvalues = inner.hermitian_eigenvalues()?;
    let f: f64 = eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}
