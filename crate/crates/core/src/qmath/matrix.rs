use std::ops::{Add, Mul, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::QmathError;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Shorthand constructor for a complex number.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix with row-major logical layout.
///
/// Invariants: at least 1x1, all entries finite. Checked constructors enforce
/// them; arithmetic between valid matrices preserves them.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, QmathError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(QmathError::Empty);
        }
        let ncols = rows[0].len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(QmathError::RaggedRows);
        }
        let nrows = rows.len();
        let inner = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        Self::checked(inner)
    }

    pub fn from_real_rows(rows: Vec<Vec<f64>>) -> Result<Self, QmathError> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| c64(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(
        nrows: usize,
        ncols: usize,
        f: F,
    ) -> Result<Self, QmathError> {
        if nrows == 0 || ncols == 0 {
            return Err(QmathError::Empty);
        }
        Self::checked(DMatrix::from_fn(nrows, ncols, f))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(nrows >= 1 && ncols >= 1);
        Self {
            inner: DMatrix::zeros(nrows, ncols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self, QmathError> {
        Self::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                c64(entries[i], 0.0)
            } else {
                C64::ZERO
            }
        })
    }

    /// Outer product |v><v|.
    pub fn outer(v: &[C64]) -> Result<Self, QmathError> {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    fn checked(inner: DMatrix<C64>) -> Result<Self, QmathError> {
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmathError::NonFinite);
        }
        Ok(Self { inner })
    }

    pub(crate) fn from_dmatrix(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { inner }
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub(crate) fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            inner: &self.inner * c64(factor, 0.0),
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    /// Largest entrywise absolute difference to another matrix of equal shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, QmathError> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(QmathError::ShapeMismatch(
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols(),
            ));
        }
        Ok(self
            .inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max entrywise |m - m^†|; zero for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.inner.adjoint();
        self.inner
            .iter()
            .zip(adj.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigendecomposition of a Hermitian matrix. Eigenvalues are returned in
    /// ascending order together with the matching eigenvector columns.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix), QmathError> {
        if !self.is_square() {
            return Err(QmathError::Dimension {
                expected: self.rows(),
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let eig = SymmetricEigen::new(self.inner.clone());
        let n = self.rows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, ComplexMatrix::from_dmatrix(vectors)))
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, QmathError> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Hermitian square root with eigenvalues clamped at zero, for matrices
    /// that are positive semidefinite up to numerical noise.
    pub fn hermitian_sqrt(&self) -> Result<ComplexMatrix, QmathError> {
        let (values, vectors) = self.hermitian_eigen()?;
        let n = self.rows();
        let v = vectors.as_dmatrix();
        let sqrt_diag =
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    c64(values[i].max(0.0).sqrt(), 0.0)
                } else {
                    C64::ZERO
                }
            });
        Ok(ComplexMatrix::from_dmatrix(v * sqrt_diag * v.adjoint()))
    }
}

/// Kronecker product with index convention (i_A i_B, j_A j_B): the first
/// factor owns the slow index, so dims multiply.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(a.as_dmatrix().kronecker(b.as_dmatrix()))
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner * &rhs.inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn projector_tensor_composition() {
        let ph = ComplexMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let pv = ComplexMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let expect = ComplexMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(tensor_product(&ph, &pv), expect);
    }

    #[test]
    fn rejects_nonfinite_entries() {
        let err = ComplexMatrix::from_real_rows(vec![vec![1.0, f64::NAN], vec![0.0, 1.0]]);
        assert_eq!(err.unwrap_err(), QmathError::NonFinite);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert_eq!(
            ComplexMatrix::from_rows(vec![]).unwrap_err(),
            QmathError::Empty
        );
        assert_eq!(
            ComplexMatrix::from_real_rows(vec![vec![1.0], vec![1.0, 2.0]]).unwrap_err(),
            QmathError::RaggedRows
        );
    }

    #[test]
    fn hermitian_eigen_recovers_known_spectrum() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_rows(vec![
            vec![c64(2.0, 0.0), c64(0.0, 1.0)],
            vec![c64(0.0, -1.0), c64(2.0, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = m.hermitian_eigen().unwrap();
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-12);
        // Reconstruct and compare.
        let d = ComplexMatrix::diagonal(&vals).unwrap();
        let rec = &(&vecs * &d) * &vecs.adjoint();
        assert!(rec.max_abs_diff(&m).unwrap() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c64(2.0, 0.0), c64(0.5, 0.25)],
            vec![c64(0.5, -0.25), c64(1.0, 0.0)],
        ])
        .unwrap();
        let s = m.hermitian_sqrt().unwrap();
        assert!((&s * &s).max_abs_diff(&m).unwrap() < 1e-12);
    }
}
