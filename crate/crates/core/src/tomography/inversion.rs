use nalgebra::{DMatrix, DVector};

use super::settings::{canonical_settings, setting_projector, TomoCounts};
use super::TomoError;
use crate::qmath::{c64, ComplexMatrix, C64};

/// Basis of the real 16-dimensional space of Hermitian 4x4 operators:
/// the four diagonal units, then for each pair i<j the symmetric and the
/// antisymmetric (imaginary) combination.
fn hermitian_basis() -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(16);
    for k in 0..4 {
        basis.push(
            ComplexMatrix::from_fn(4, 4, |i, j| {
                if i == k && j == k {
                    c64(1.0, 0.0)
                } else {
                    C64::ZERO
                }
            })
            .expect("finite"),
        );
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            basis.push(
                ComplexMatrix::from_fn(4, 4, |r, c| {
                    if (r, c) == (i, j) || (r, c) == (j, i) {
                        c64(1.0, 0.0)
                    } else {
                        C64::ZERO
                    }
                })
                .expect("finite"),
            );
            basis.push(
                ComplexMatrix::from_fn(4, 4, |r, c| {
                    if (r, c) == (i, j) {
                        c64(0.0, 1.0)
                    } else if (r, c) == (j, i) {
                        c64(0.0, -1.0)
                    } else {
                        C64::ZERO
                    }
                })
                .expect("finite"),
            );
        }
    }
    basis
}

/// Solve tr[ρ Π_ν] = p_ν for the 16 real parameters of a Hermitian ρ.
///
/// Counts become probabilities through the {HH, HV, VV, VH} subgroup sum (a
/// complete basis, so its probabilities add to 1), which also pins tr ρ = 1.
/// The output is Hermitian but may be non-positive with noisy counts; it is
/// returned unvalidated on purpose.
pub fn linear_inversion(counts: &TomoCounts) -> Result<ComplexMatrix, TomoError> {
    let scale = counts.basis_subgroup_total();
    if scale <= 0.0 {
        return Err(TomoError::ZeroTotalCounts);
    }
    let probabilities: Vec<f64> = counts.counts().iter().map(|&n| n / scale).collect();

    let basis = hermitian_basis();
    let projectors: Vec<_> = canonical_settings()
        .iter()
        .map(|&s| setting_projector(s))
        .collect();
    let design = DMatrix::from_fn(16, 16, |nu, k| (&basis[k] * &projectors[nu]).trace().re);
    let rhs = DVector::from_iterator(16, probabilities.iter().copied());
    let solution = design
        .lu()
        .solve(&rhs)
        .ok_or(TomoError::SingularFrame)?;

    let mut rho = ComplexMatrix::zeros(4, 4);
    for (k, b) in basis.iter().enumerate() {
        rho = &rho + &b.scale(solution[k]);
    }
    Ok(rho)
}
