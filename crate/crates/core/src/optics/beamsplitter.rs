use std::collections::BTreeMap;

use super::fock::{BosonicState, FockBasisState};
use super::mode::{ModeLabel, Spatial};
use super::OpticsError;
use crate::qmath::{c64, C64};

/// Two-mode transform with reflectance `r`: the first input couples to the
/// outputs as (√R, √T), the second as (√T, −√R). Rows are outputs, columns
/// inputs; real and unitary for every r in (0, 1).
pub fn beamsplitter_matrix(r: f64) -> [[f64; 2]; 2] {
    let t = 1.0 - r;
    [[r.sqrt(), t.sqrt()], [t.sqrt(), -r.sqrt()]]
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Substitute creation operators of the input ports by the beam splitter
/// relations and re-expand in the occupation basis of the output ports.
///
/// Polarization and internal labels ride along unchanged; the √n! bosonic
/// normalization is accounted for, so the output norm equals the input norm.
/// Photons already occupying an output port are an error, as are photons on
/// ports that are neither input.
pub fn apply_beamsplitter(
    state: &BosonicState,
    r: f64,
    in_pair: (Spatial, Spatial),
    out_pair: (Spatial, Spatial),
) -> Result<BosonicState, OpticsError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(OpticsError::ReflectanceOutOfRange(r));
    }
    let (in1, in2) = in_pair;
    let (out1, out2) = out_pair;
    if in1 == in2 || out1 == out2 || in1 == out1 || in1 == out2 || in2 == out1 || in2 == out2 {
        return Err(OpticsError::DegenerateModePair);
    }
    let bs = beamsplitter_matrix(r);

    let mut result: BTreeMap<FockBasisState, C64> = BTreeMap::new();
    for (basis, amp) in state.terms() {
        for (mode, _) in basis.occupations() {
            if mode.spatial == out1 || mode.spatial == out2 {
                return Err(OpticsError::OccupiedOutputMode(mode.spatial));
            }
            if mode.spatial != in1 && mode.spatial != in2 {
                return Err(OpticsError::UnexpectedOccupation(mode.spatial));
            }
        }

        // Convert the normalized basis state to a creation-operator string:
        // |{n}⟩ = ∏ (m†)^n / √(n!) |vac⟩.
        let mut string_coeff = 1.0;
        // Partial expansions: exponent map over output modes → coefficient.
        let mut expansions: Vec<(BTreeMap<ModeLabel, u32>, f64)> =
            vec![(BTreeMap::new(), 1.0)];
        for (mode, n) in basis.occupations() {
            string_coeff /= factorial(n).sqrt();
            let col = if mode.spatial == in1 { 0 } else { 1 };
            let (to_out1, to_out2) = (bs[0][col], bs[1][col]);
            let m1 = ModeLabel::new(out1, mode.pol, mode.internal);
            let m2 = ModeLabel::new(out2, mode.pol, mode.internal);
            let mut next = Vec::with_capacity(expansions.len() * (n as usize + 1));
            for (exponents, coeff) in &expansions {
                for k in 0..=n {
                    let mut exp = exponents.clone();
                    if k > 0 {
                        *exp.entry(m1).or_insert(0) += k;
                    }
                    if n - k > 0 {
                        *exp.entry(m2).or_insert(0) += n - k;
                    }
                    let factor =
                        binomial(n, k) * to_out1.powi(k as i32) * to_out2.powi((n - k) as i32);
                    next.push((exp, coeff * factor));
                }
            }
            expansions = next;
        }

        // Back to normalized basis states: ∏ (m†)^n |vac⟩ = √(n!) |{n}⟩.
        for (exponents, coeff) in expansions {
            let back: f64 = exponents
                .values()
                .map(|&n| factorial(n))
                .product::<f64>()
                .sqrt();
            let term_amp = amp * c64(string_coeff * coeff * back, 0.0);
            let out_basis = FockBasisState::from_occupations(exponents)?;
            *result.entry(out_basis).or_insert(C64::ZERO) += term_amp;
        }
    }
    Ok(BosonicState::from_map(result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::mode::{Internal, Pol};
    use proptest::prelude::*;

    fn m(spatial: Spatial, pol: Pol, internal: Internal) -> ModeLabel {
        ModeLabel::new(spatial, pol, internal)
    }

    const AB: (Spatial, Spatial) = (Spatial::A, Spatial::B);
    const CD: (Spatial, Spatial) = (Spatial::C, Spatial::D);

    #[test]
    fn single_photon_splits_evenly_at_balanced_reflectance() {
        let input = BosonicState::single_photon(m(Spatial::A, Pol::H, Internal::W0));
        let out = apply_beamsplitter(&input, 0.5, AB, CD).unwrap();
        let c = out.amplitude(&FockBasisState::single(m(Spatial::C, Pol::H, Internal::W0)));
        let d = out.amplitude(&FockBasisState::single(m(Spatial::D, Pol::H, Internal::W0)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.re - s).abs() < 1e-15 && c.im == 0.0);
        assert!((d.re - s).abs() < 1e-15 && d.im == 0.0);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn orthogonal_pair_expands_to_four_equal_terms() {
        // One H photon in 'a', one V photon in 'b', balanced splitter:
        // (c_H c_V - d_H d_V - c_H d_V + c_V d_H) / 2.
        let input = BosonicState::from_terms([(
            FockBasisState::from_occupations([
                (m(Spatial::A, Pol::H, Internal::W0), 1),
                (m(Spatial::B, Pol::V, Internal::W0), 1),
            ])
            .unwrap(),
            c64(1.0, 0.0),
        )])
        .unwrap();
        let out = apply_beamsplitter(&input, 0.5, AB, CD).unwrap();

        let amp = |pairs: &[(ModeLabel, u32)]| {
            out.amplitude(&FockBasisState::from_occupations(pairs.iter().copied()).unwrap())
        };
        let cc = amp(&[
            (m(Spatial::C, Pol::H, Internal::W0), 1),
            (m(Spatial::C, Pol::V, Internal::W0), 1),
        ]);
        let dd = amp(&[
            (m(Spatial::D, Pol::H, Internal::W0), 1),
            (m(Spatial::D, Pol::V, Internal::W0), 1),
        ]);
        let c_h_d_v = amp(&[
            (m(Spatial::C, Pol::H, Internal::W0), 1),
            (m(Spatial::D, Pol::V, Internal::W0), 1),
        ]);
        let c_v_d_h = amp(&[
            (m(Spatial::C, Pol::V, Internal::W0), 1),
            (m(Spatial::D, Pol::H, Internal::W0), 1),
        ]);
        assert!((cc.re - 0.5).abs() < 1e-15);
        assert!((dd.re + 0.5).abs() < 1e-15);
        assert!((c_h_d_v.re + 0.5).abs() < 1e-15);
        assert!((c_v_d_h.re - 0.5).abs() < 1e-15);
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn identical_photons_interfere_and_coincidences_cancel() {
        // Same polarization, same internal label: the c†d† term vanishes.
        let input = BosonicState::from_terms([(
            FockBasisState::from_occupations([
                (m(Spatial::A, Pol::H, Internal::W0), 1),
                (m(Spatial::B, Pol::H, Internal::W0), 1),
            ])
            .unwrap(),
            c64(1.0, 0.0),
        )])
        .unwrap();
        let out = apply_beamsplitter(&input, 0.5, AB, CD).unwrap();
        let coincidence = out.amplitude(
            &FockBasisState::from_occupations([
                (m(Spatial::C, Pol::H, Internal::W0), 1),
                (m(Spatial::D, Pol::H, Internal::W0), 1),
            ])
            .unwrap(),
        );
        assert_eq!(coincidence, C64::ZERO);
        // The bunched terms carry amplitude √(2RT) = 1/√2 each.
        let bunched =
            out.amplitude(&FockBasisState::from_occupations([(
                m(Spatial::C, Pol::H, Internal::W0),
                2,
            )])
            .unwrap());
        assert!((bunched.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn occupied_output_is_rejected() {
        let input = BosonicState::single_photon(m(Spatial::C, Pol::H, Internal::W0));
        assert_eq!(
            apply_beamsplitter(&input, 0.5, AB, CD).unwrap_err(),
            OpticsError::OccupiedOutputMode(Spatial::C)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transform_matrix_is_unitary(r in 1e-6..=0.999999f64) {
            let bs = beamsplitter_matrix(r);
            let dot_cols = bs[0][0] * bs[0][1] + bs[1][0] * bs[1][1];
            let col0 = bs[0][0] * bs[0][0] + bs[1][0] * bs[1][0];
            let col1 = bs[0][1] * bs[0][1] + bs[1][1] * bs[1][1];
            prop_assert!(dot_cols.abs() < 1e-12);
            prop_assert!((col0 - 1.0).abs() < 1e-12);
            prop_assert!((col1 - 1.0).abs() < 1e-12);
        }

        #[test]
        fn norm_and_photon_number_preserved(
            r in 0.05..=0.95f64,
            na in 0u32..=2,
            nb in 0u32..=2,
            re in -1.0..1.0f64,
            im in -1.0..1.0f64,
        ) {
            prop_assume!(na + nb > 0);
            prop_assume!(re.abs() + im.abs() > 1e-3);
            // Two-term superposition mixing polarization and internal labels.
            let basis1 = FockBasisState::from_occupations([
                (m(Spatial::A, Pol::H, Internal::W0), na),
                (m(Spatial::B, Pol::V, Internal::W0), nb),
            ]).unwrap();
            let basis2 = FockBasisState::from_occupations([
                (m(Spatial::A, Pol::H, Internal::WPerp), na),
                (m(Spatial::B, Pol::H, Internal::W0), nb),
            ]).unwrap();
            let raw = BosonicState::from_terms([
                (basis1, c64(re, im)),
                (basis2, c64(im, -re)),
            ]).unwrap();
            let scale = 1.0 / raw.norm();
            let state = BosonicState::from_terms(
                raw.terms().map(|(b, a)| (b.clone(), a * scale)),
            ).unwrap();

            let out = apply_beamsplitter(&state, r, AB, CD).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
            for (basis, _) in out.terms() {
                prop_assert_eq!(basis.total(), na + nb);
            }
        }
    }
}
