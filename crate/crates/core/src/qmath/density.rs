use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize, Serializer};

use super::matrix::{c64, ComplexMatrix, C64};
use super::{QmathError, Violation};
use crate::numfmt::sig12;

/// Fixed basis order for two-qubit polarization states. The first letter is
/// the photon in output port 'c', the second the photon in port 'd'.
pub const TWO_QUBIT_BASIS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Default tolerance for physicality checks.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// A Hermitian, trace-one, positive semidefinite matrix over the
/// (H/V)⊗(H/V) polarization basis (dim 4) or a single polarization (dim 2).
///
/// Construction always goes through [`validate_density`]; a value of this
/// type is guaranteed Hermitian with trace 1 and eigenvalues ≥ 0 up to the
/// validation tolerance (tiny negative eigenvalues are clamped to zero and
/// the spectrum renormalized).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

/// Check Hermiticity, unit trace and the eigenvalue floor at tolerance `tol`.
///
/// Eigenvalues in [-tol, 0) are clamped to zero and the spectrum is
/// renormalized; anything worse is reported, with every violation named
/// together with its offending magnitude.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix, QmathError> {
    if !m.is_square() {
        return Err(QmathError::Dimension {
            expected: m.rows(),
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut violations = Vec::new();
    let defect = m.hermiticity_defect();
    if defect > tol {
        violations.push(Violation::NotHermitian(defect));
    }
    // Work on the Hermitian part; identical to the input when the defect is 0.
    let herm = if defect == 0.0 {
        m
    } else {
        (&m + &m.adjoint()).scale(0.5)
    };
    let trace = herm.trace().re;
    let trace_dev = (trace - 1.0).abs();
    if trace_dev > tol {
        violations.push(Violation::TraceDeviation(trace_dev));
    }
    let eigenvalues = herm.hermitian_eigenvalues()?;
    let min_eig = eigenvalues[0];
    if min_eig < -tol {
        violations.push(Violation::NegativeEigenvalue(min_eig));
    }
    if !violations.is_empty() {
        return Err(QmathError::InvalidDensity(violations));
    }
    if min_eig >= 0.0 {
        let mat = if trace_dev == 0.0 {
            herm
        } else {
            herm.scale(1.0 / trace)
        };
        return Ok(DensityMatrix { mat });
    }
    // Clamp the in-tolerance negative part of the spectrum and renormalize.
    let (values, vectors) = herm.hermitian_eigen()?;
    let clamped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let scaled: Vec<f64> = clamped.iter().map(|&v| v / total).collect();
    let diag = ComplexMatrix::diagonal(&scaled)?;
    let mat = &(&vectors * &diag) * &vectors.adjoint();
    Ok(DensityMatrix { mat })
}

impl DensityMatrix {
    /// Validate with the default tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self, QmathError> {
        validate_density(m, PHYSICALITY_TOL)
    }

    /// Trusted constructor for matrices that are density matrices by
    /// construction (projectors of normalized states, convex mixtures of
    /// valid states). Debug builds still verify.
    pub(crate) fn from_valid(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_defect() <= 1e-12);
        debug_assert!((mat.trace().re - 1.0).abs() <= 1e-12);
        DensityMatrix { mat }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Random density matrix ρ = A A† / tr(A A†) with complex standard
    /// normal A (Hilbert–Schmidt ensemble).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let rho = &a * a.adjoint();
        let trace = rho.trace().re;
        DensityMatrix::new(ComplexMatrix::from_dmatrix(rho / c64(trace, 0.0)))
            .expect("Gram matrix is a valid state")
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat.get(i, j)
    }

    /// ⟨Op⟩ = Re tr(ρ·Op) for a Hermitian observable or projector.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64, QmathError> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(QmathError::ShapeMismatch(
                self.dim(),
                self.dim(),
                op.rows(),
                op.cols(),
            ));
        }
        Ok((&self.mat * op).trace().re)
    }

    /// JSON form: `{"dim":4,"basis":["HH","HV","VH","VV"],"re":[[..]],"im":[[..]]}`
    /// with entries rounded to 12 significant digits.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DensityMatrixJson::from(self)).expect("serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&DensityMatrixJson::from(self)).expect("serializable")
    }

    /// Parse and validate the JSON form at tolerance `tol`.
    pub fn from_json_str(s: &str, tol: f64) -> Result<Self, QmathError> {
        let dto: DensityMatrixJson =
            serde_json::from_str(s).map_err(|e| QmathError::Json(e.to_string()))?;
        dto.into_density(tol)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DensityMatrixJson::from(self).serialize(serializer)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    basis: Vec<String>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for DensityMatrixJson {
    fn from(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let basis = match n {
            4 => TWO_QUBIT_BASIS.iter().map(|s| s.to_string()).collect(),
            2 => vec!["H".to_string(), "V".to_string()],
            _ => (0..n).map(|i| i.to_string()).collect(),
        };
        DensityMatrixJson {
            dim: n,
            basis,
            re: (0..n)
                .map(|i| (0..n).map(|j| sig12(rho.get(i, j).re)).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| sig12(rho.get(i, j).im)).collect())
                .collect(),
        }
    }
}

impl DensityMatrixJson {
    fn into_density(self, tol: f64) -> Result<DensityMatrix, QmathError> {
        if self.dim == 0 {
            return Err(QmathError::Json("dim must be >= 1".into()));
        }
        if self.basis.len() != self.dim {
            return Err(QmathError::Json(format!(
                "basis has {} labels for dim {}",
                self.basis.len(),
                self.dim
            )));
        }
        if self.dim == 4 && self.basis != TWO_QUBIT_BASIS {
            return Err(QmathError::Json(format!(
                "basis must be {TWO_QUBIT_BASIS:?} for dim 4, got {:?}",
                self.basis
            )));
        }
        let shape_ok = |m: &Vec<Vec<f64>>| {
            m.len() == self.dim && m.iter().all(|row| row.len() == self.dim)
        };
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(QmathError::Json(format!(
                "re/im must both be {0}x{0} arrays",
                self.dim
            )));
        }
        let mat = ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            c64(self.re[i][j], self.im[i][j])
        })?;
        validate_density(mat, tol)
    }
}

/// A normalized pure state over [HH, HV, VH, VV].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState2Q {
    amps: [C64; 4],
}

impl PureState2Q {
    /// Requires the L2 norm to be 1 within 1e-12.
    pub fn new(amps: [C64; 4]) -> Result<Self, QmathError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QmathError::NonFinite);
        }
        let dev = (norm - 1.0).abs();
        if dev > 1e-12 {
            return Err(QmathError::NotNormalized(dev));
        }
        Ok(PureState2Q { amps })
    }

    /// The singlet (|HV⟩ − |VH⟩)/√2.
    pub fn psi_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState2Q {
            amps: [C64::ZERO, c64(s, 0.0), c64(-s, 0.0), C64::ZERO],
        }
    }

    /// (|HV⟩ + |VH⟩)/√2.
    pub fn psi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState2Q {
            amps: [C64::ZERO, c64(s, 0.0), c64(s, 0.0), C64::ZERO],
        }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    /// The projector |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let outer = ComplexMatrix::outer(&self.amps).expect("amps are finite");
        let trace = outer.trace().re;
        DensityMatrix::from_valid(outer.scale(1.0 / trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn maximally_mixed_accepted_unchanged() {
        let mixed = ComplexMatrix::identity(4).scale(0.25);
        let rho = validate_density(mixed.clone(), 1e-9).unwrap();
        assert_eq!(rho.matrix(), &mixed);
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped_and_renormalized() {
        let m = ComplexMatrix::diagonal(&[0.6, 0.4, -1e-12, 1e-12]).unwrap();
        let rho = validate_density(m, 1e-9).unwrap();
        let eigs = rho.matrix().hermitian_eigenvalues().unwrap();
        assert!(eigs[0] >= 0.0, "clamped spectrum: {eigs:?}");
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_deviation_reported_with_magnitude() {
        let m = ComplexMatrix::diagonal(&[0.3, 0.3, 0.3, 0.0]).unwrap();
        let err = validate_density(m, 1e-9).unwrap_err();
        match err {
            QmathError::InvalidDensity(vs) => {
                assert!(vs
                    .iter()
                    .any(|v| matches!(v, Violation::TraceDeviation(d) if (d - 0.1).abs() < 1e-12)));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn all_violations_reported_together() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c64(1.2, 0.0), c64(0.5, 0.1)],
            vec![c64(0.1, 0.1), c64(-0.5, 0.0)],
        ])
        .unwrap();
        match validate_density(m, 1e-9).unwrap_err() {
            QmathError::InvalidDensity(vs) => {
                assert!(vs.iter().any(|v| matches!(v, Violation::NotHermitian(_))));
                assert!(vs
                    .iter()
                    .any(|v| matches!(v, Violation::NegativeEigenvalue(_))));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pure_state_requires_unit_norm() {
        let err = PureState2Q::new([c64(1.0, 0.0), c64(1.0, 0.0), C64::ZERO, C64::ZERO]);
        assert!(matches!(err, Err(QmathError::NotNormalized(_))));
        let ok = PureState2Q::psi_minus();
        assert_eq!(ok.density().dim(), 4);
    }

    #[test]
    fn json_round_trip_preserves_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let rho = DensityMatrix::random(4, &mut rng);
        let text = rho.to_json_string();
        let back = DensityMatrix::from_json_str(&text, 1e-9).unwrap();
        assert!(rho.matrix().max_abs_diff(back.matrix()).unwrap() < 1e-11);
    }

    #[test]
    fn json_reader_rejects_wrong_basis() {
        let rho = DensityMatrix::maximally_mixed(4);
        let text = rho.to_json_string().replace("\"HV\"", "\"XY\"");
        assert!(matches!(
            DensityMatrix::from_json_str(&text, 1e-9),
            Err(QmathError::Json(_))
        ));
    }

    #[test]
    fn json_reader_validates_physicality() {
        let bad = r#"{"dim":4,"basis":["HH","HV","VH","VV"],
            "re":[[0.9,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
        assert!(matches!(
            DensityMatrix::from_json_str(bad, 1e-9),
            Err(QmathError::InvalidDensity(_))
        ));
    }
}
