use super::beamsplitter::apply_beamsplitter;
use super::fock::WeightedEnsemble;
use super::mode::Spatial;
use super::source::{postselect_coincidence, prepare_source_pair, SourceParams};
use super::OpticsError;
use crate::qmath::{c64, ComplexMatrix, DensityMatrix, C64};

/// Closed-form post-selected polarization state in [HH, HV, VH, VV]:
///
/// ```text
///            1            ⎛ 2g²              ⎞
/// ρ = ───────────────── · ⎜      R/T  −V     ⎟
///     R/T + T/R + 4g²     ⎜      −V   T/R    ⎟
///                         ⎝              2g² ⎠
/// ```
///
/// Positive semidefinite for every V ≤ 1, so construction cannot fail.
pub fn rho_model(p: &SourceParams) -> DensityMatrix {
    let g2 = p.g2();
    let ratio = p.ratio();
    let denom = ratio + 1.0 / ratio + 4.0 * g2;
    let corner = 2.0 * g2 / denom;
    let hv = ratio / denom;
    let vh = (1.0 / ratio) / denom;
    let off = -p.overlap() / denom;
    let z = C64::ZERO;
    let mat = ComplexMatrix::from_rows(vec![
        vec![c64(corner, 0.0), z, z, z],
        vec![z, c64(hv, 0.0), c64(off, 0.0), z],
        vec![z, c64(off, 0.0), c64(vh, 0.0), z],
        vec![z, z, z, c64(corner, 0.0)],
    ])
    .expect("finite entries");
    DensityMatrix::from_valid(mat)
}

/// Brute-force re-derivation of [`rho_model`]: prepare the source ensemble,
/// push every component through the beam splitter amplitude expansion, and
/// post-select coincidences. No closed-form shortcuts; this is the
/// independent oracle the model is checked against.
pub fn oracle_rho(p: &SourceParams) -> Result<(DensityMatrix, f64), OpticsError> {
    let ensemble = prepare_source_pair(p)?;
    let mut transformed = Vec::with_capacity(ensemble.components().len());
    for (weight, state) in ensemble.components() {
        let out = apply_beamsplitter(
            state,
            p.reflectance(),
            (Spatial::A, Spatial::B),
            (Spatial::C, Spatial::D),
        )?;
        transformed.push((*weight, out));
    }
    postselect_coincidence(&WeightedEnsemble::new(transformed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{fidelity, negativity, PureState2Q};

    #[test]
    fn ideal_model_is_the_singlet_projector() {
        let rho = rho_model(&SourceParams::ideal());
        let singlet = PureState2Q::psi_minus().density();
        assert!(rho.matrix().max_abs_diff(singlet.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn distinguishable_photons_give_the_classical_mixture() {
        let p = SourceParams::new(0.0, 0.0, 0.5).unwrap();
        let rho = rho_model(&p);
        let expect = ComplexMatrix::diagonal(&[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert!(rho.matrix().max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn unbalanced_model_entries() {
        // R/T = 1.1, g² = 0.02, V = 0.8; denominator 1.1 + 1/1.1 + 0.08.
        let p = SourceParams::from_ratio(0.02, 0.8, 1.1).unwrap();
        let rho = rho_model(&p);
        let denom: f64 = 1.1 + 1.0 / 1.1 + 0.08;
        assert!((denom - 2.089090909090909).abs() < 1e-14);
        let expect_diag = [0.04 / denom, 1.1 / denom, (1.0 / 1.1) / denom, 0.04 / denom];
        for (i, want) in expect_diag.iter().enumerate() {
            assert!(
                (rho.get(i, i).re - want).abs() < 1e-12,
                "diag {i}: {} vs {want}",
                rho.get(i, i).re
            );
        }
        assert!((rho.get(1, 2).re - (-0.8 / denom)).abs() < 1e-12);
        assert!((rho.get(1, 2).re - (-0.382941688424717)).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_ideal_singlet() {
        let (rho, success) = oracle_rho(&SourceParams::ideal()).unwrap();
        let singlet = PureState2Q::psi_minus().density();
        assert!(fidelity(&rho, &singlet).unwrap() > 1.0 - 1e-12);
        assert!((success - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_model_entrywise_for_imperfect_source() {
        let p = SourceParams::from_ratio(0.02, 0.8, 1.1).unwrap();
        let (oracle, _) = oracle_rho(&p).unwrap();
        let model = rho_model(&p);
        assert!(oracle.matrix().max_abs_diff(model.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn oracle_success_probability_tracks_the_mixture() {
        // (R² + T² + 4RT·g²) / (1 + 2g²): coincidences from the anticorrelated
        // pair plus the two double-pulse components.
        for &(g2, ratio) in &[(0.0, 1.0), (0.02, 1.1), (0.05, 0.8)] {
            let p = SourceParams::from_ratio(g2, 0.7, ratio).unwrap();
            let (r, t) = (p.reflectance(), p.transmittance());
            let expect = (r * r + t * t + 4.0 * r * t * g2) / (1.0 + 2.0 * g2);
            let (_, success) = oracle_rho(&p).unwrap();
            assert!(
                (success - expect).abs() < 1e-12,
                "g2={g2} ratio={ratio}: {success} vs {expect}"
            );
        }
    }

    #[test]
    fn entanglement_boundary_at_twice_g2() {
        // Negativity is positive exactly when V > 2g², zero on the line.
        for &g2 in &[0.0, 0.01, 0.03, 0.1] {
            let at = |v: f64| {
                negativity(&rho_model(&SourceParams::new(g2, v, 0.5).unwrap())).unwrap()
            };
            let boundary = 2.0 * g2;
            if boundary <= 1.0 {
                assert!(at(boundary) < 1e-12, "g2={g2}");
            }
            if boundary + 0.01 <= 1.0 {
                assert!(at(boundary + 0.01) > 1e-4, "g2={g2}");
            }
            if boundary > 0.0 {
                assert!(at(boundary - 0.01) < 1e-12, "g2={g2}");
            }
        }
    }

    #[test]
    fn negativity_closed_form_at_balanced_splitter() {
        // 2(V − 2g²)/(2 + 4g²) above the boundary; 0.5 for g²=0, V=0.5.
        let p = SourceParams::new(0.0, 0.5, 0.5).unwrap();
        assert!((negativity(&rho_model(&p)).unwrap() - 0.5).abs() < 1e-12);
        for &(g2, v) in &[(0.01, 0.9), (0.02, 0.5), (0.0, 1.0)] {
            let p = SourceParams::new(g2, v, 0.5).unwrap();
            let expect = (2.0 * (v - 2.0 * g2) / (2.0 + 4.0 * g2)).max(0.0);
            assert!((negativity(&rho_model(&p)).unwrap() - expect).abs() < 1e-9);
        }
    }
}
