use std::str::FromStr;

use super::OpticsError;
use crate::qmath::{c64, ComplexMatrix};

/// Polarization element kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JonesKind {
    Hwp,
    Qwp,
    Polarizer,
}

impl FromStr for JonesKind {
    type Err = OpticsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hwp" => Ok(JonesKind::Hwp),
            "qwp" => Ok(JonesKind::Qwp),
            "polarizer" | "pol" => Ok(JonesKind::Polarizer),
            other => Err(OpticsError::UnknownElementKind(other.to_string())),
        }
    }
}

/// A wave plate (fast axis) or polarizer (transmission axis) at `angle_deg`
/// from horizontal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesElement {
    pub kind: JonesKind,
    pub angle_deg: f64,
}

impl JonesElement {
    pub fn matrix(&self) -> Result<ComplexMatrix, OpticsError> {
        jones_element(self.kind, self.angle_deg)
    }
}

/// 2x2 polarization transform in the (H, V) basis.
///
/// Wave plates are R(θ)·diag(1, e^{-iδ})·R(-θ) with the retardation on the
/// slow axis (δ = π for HWP, π/2 for QWP); under this convention a QWP at
/// 45° sends H to (H + iV)/√2 up to a global phase. The polarizer is the
/// rank-1 projector onto linear polarization at θ.
pub fn jones_element(kind: JonesKind, angle_deg: f64) -> Result<ComplexMatrix, OpticsError> {
    if !angle_deg.is_finite() {
        return Err(OpticsError::NonFiniteAngle);
    }
    let theta = angle_deg.to_radians();
    let (s, c) = theta.sin_cos();
    let rows = match kind {
        JonesKind::Hwp => vec![
            vec![c64(c * c - s * s, 0.0), c64(2.0 * s * c, 0.0)],
            vec![c64(2.0 * s * c, 0.0), c64(s * s - c * c, 0.0)],
        ],
        JonesKind::Qwp => vec![
            vec![c64(c * c, -s * s), c64(s * c, s * c)],
            vec![c64(s * c, s * c), c64(s * s, -c * c)],
        ],
        JonesKind::Polarizer => vec![
            vec![c64(c * c, 0.0), c64(s * c, 0.0)],
            vec![c64(s * c, 0.0), c64(s * s, 0.0)],
        ],
    };
    Ok(ComplexMatrix::from_rows(rows).expect("entries finite"))
}

/// Projector onto linear polarization at `angle_deg` (same as POLARIZER).
pub fn polarizer_projector(angle_deg: f64) -> ComplexMatrix {
    jones_element(JonesKind::Polarizer, angle_deg).expect("finite angle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::C64;
    use proptest::prelude::*;

    fn apply(m: &ComplexMatrix, v: [C64; 2]) -> [C64; 2] {
        [
            m.get(0, 0) * v[0] + m.get(0, 1) * v[1],
            m.get(1, 0) * v[0] + m.get(1, 1) * v[1],
        ]
    }

    /// |⟨u|v⟩|² / (|u|²|v|²): 1 exactly when equal up to a global phase.
    fn overlap(u: [C64; 2], v: [C64; 2]) -> f64 {
        let inner = u[0].conj() * v[0] + u[1].conj() * v[1];
        inner.norm_sqr() / ((u[0].norm_sqr() + u[1].norm_sqr()) * (v[0].norm_sqr() + v[1].norm_sqr()))
    }

    const H: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];

    #[test]
    fn polarizer_at_zero_is_h_projector() {
        let m = jones_element(JonesKind::Polarizer, 0.0).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0]).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn hwp_at_45_rotates_h_to_v() {
        let m = jones_element(JonesKind::Hwp, 45.0).unwrap();
        let v = apply(&m, H);
        let expect = [c64(0.0, 0.0), c64(1.0, 0.0)];
        assert!((overlap(v, expect) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qwp_at_45_makes_left_circular_from_h() {
        let m = jones_element(JonesKind::Qwp, 45.0).unwrap();
        let v = apply(&m, H);
        let expect = [c64(1.0, 0.0), c64(0.0, 1.0)]; // (H + iV), unnormalized
        assert!((overlap(v, expect) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        assert!(matches!(
            "diattenuator".parse::<JonesKind>(),
            Err(OpticsError::UnknownElementKind(_))
        ));
        assert_eq!("HWP".parse::<JonesKind>().unwrap(), JonesKind::Hwp);
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert_eq!(
            jones_element(JonesKind::Hwp, f64::NAN).unwrap_err(),
            OpticsError::NonFiniteAngle
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wave_plates_are_unitary(angle in -360.0..360.0f64) {
            for kind in [JonesKind::Hwp, JonesKind::Qwp] {
                let m = jones_element(kind, angle).unwrap();
                let prod = &m.adjoint() * &m;
                prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
            }
        }

        #[test]
        fn polarizer_is_rank_one_projector(angle in -360.0..360.0f64) {
            let m = jones_element(JonesKind::Polarizer, angle).unwrap();
            let sq = &m * &m;
            prop_assert!(sq.max_abs_diff(&m).unwrap() < 1e-12);
            prop_assert!((m.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(m.hermiticity_defect() < 1e-12);
        }
    }
}
