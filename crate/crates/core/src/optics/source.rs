use super::fock::{BosonicState, FockBasisState, WeightedEnsemble};
use super::mode::{Internal, ModeLabel, Pol, Spatial};
use super::OpticsError;
use crate::qmath::{c64, validate_density, ComplexMatrix, DensityMatrix, C64};

/// Source and beam splitter parameters.
///
/// `g2` is the equal-time second-order correlation (residual multi-photon
/// fraction), `overlap` the squared wavefunction overlap V between the two
/// colliding photons, and `reflectance` the beam splitter reflectance R with
/// T = 1 − R held exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    g2: f64,
    overlap: f64,
    reflectance: f64,
}

impl SourceParams {
    pub fn new(g2: f64, overlap: f64, reflectance: f64) -> Result<Self, OpticsError> {
        if !g2.is_finite() || g2 < 0.0 {
            return Err(OpticsError::G2OutOfRange(g2));
        }
        if !overlap.is_finite() || !(0.0..=1.0).contains(&overlap) {
            return Err(OpticsError::OverlapOutOfRange(overlap));
        }
        if !reflectance.is_finite() || !(reflectance > 0.0 && reflectance < 1.0) {
            return Err(OpticsError::ReflectanceOutOfRange(reflectance));
        }
        Ok(SourceParams {
            g2,
            overlap,
            reflectance,
        })
    }

    /// Construct from the ratio R/T instead of R itself.
    pub fn from_ratio(g2: f64, overlap: f64, ratio: f64) -> Result<Self, OpticsError> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(OpticsError::ReflectanceOutOfRange(ratio));
        }
        Self::new(g2, overlap, ratio / (1.0 + ratio))
    }

    /// Perfect source on a balanced splitter: g² = 0, V = 1, R = T.
    pub fn ideal() -> Self {
        SourceParams {
            g2: 0.0,
            overlap: 1.0,
            reflectance: 0.5,
        }
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn reflectance(&self) -> f64 {
        self.reflectance
    }

    pub fn transmittance(&self) -> f64 {
        1.0 - self.reflectance
    }

    pub fn ratio(&self) -> f64 {
        self.reflectance / self.transmittance()
    }
}

fn mode(spatial: Spatial, pol: Pol, internal: Internal) -> ModeLabel {
    ModeLabel::new(spatial, pol, internal)
}

/// The three-component mixture at the beam splitter inputs.
///
/// With w₂ = g²/(1 + 2g²):
/// - weight 1 − 2w₂ — one H photon in 'a' on the reference wavepacket, one V
///   photon in 'b' in the coherent superposition √V·w0 + √(1−V)·w⊥;
/// - weight w₂ — a residual double pulse: two H photons in 'a', both w0;
/// - weight w₂ — two V photons in 'b', both w0.
///
/// The calibration w₂ ∝ g² makes the post-selected HH/VV weights come out at
/// 2g² against R/T and T/R for the anticorrelated terms.
pub fn prepare_source_pair(p: &SourceParams) -> Result<WeightedEnsemble, OpticsError> {
    let w2 = p.g2() / (1.0 + 2.0 * p.g2());
    if 2.0 * w2 > 0.5 {
        return Err(OpticsError::PumpTooStrong(2.0 * w2));
    }
    let a_h = mode(Spatial::A, Pol::H, Internal::W0);
    let b_v0 = mode(Spatial::B, Pol::V, Internal::W0);
    let b_vp = mode(Spatial::B, Pol::V, Internal::WPerp);

    let matched = p.overlap().sqrt();
    let mismatched = (1.0 - p.overlap()).sqrt();
    let pair = BosonicState::from_terms([
        (
            FockBasisState::from_occupations([(a_h, 1), (b_v0, 1)])?,
            c64(matched, 0.0),
        ),
        (
            FockBasisState::from_occupations([(a_h, 1), (b_vp, 1)])?,
            c64(mismatched, 0.0),
        ),
    ])?;

    let mut components = vec![(1.0 - 2.0 * w2, pair)];
    if w2 > 0.0 {
        let double_h = BosonicState::from_terms([(
            FockBasisState::from_occupations([(a_h, 2)])?,
            c64(1.0, 0.0),
        )])?;
        let double_v = BosonicState::from_terms([(
            FockBasisState::from_occupations([(mode(Spatial::B, Pol::V, Internal::W0), 2)])?,
            c64(1.0, 0.0),
        )])?;
        components.push((w2, double_h));
        components.push((w2, double_v));
    }
    WeightedEnsemble::new(components)
}

const POSTSELECT_EPS: f64 = 1e-18;

fn coincidence_index(pol_c: Pol, int_c: Internal, pol_d: Pol, int_d: Internal) -> usize {
    let p = |pol: Pol| match pol {
        Pol::H => 0,
        Pol::V => 1,
    };
    let w = |int: Internal| match int {
        Internal::W0 => 0,
        Internal::WPerp => 1,
    };
    ((p(pol_c) * 2 + w(int_c)) * 2 + p(pol_d)) * 2 + w(int_d)
}

/// Project onto exactly one photon in port 'c' and one in port 'd', trace
/// out internal labels, and return the normalized polarization state over
/// [HH, HV, VH, VV] (first slot = 'c') plus the success probability.
pub fn postselect_coincidence(
    ensemble: &WeightedEnsemble,
) -> Result<(DensityMatrix, f64), OpticsError> {
    let mut rho16 = vec![[C64::ZERO; 16]; 16];
    let mut success = 0.0;
    for (weight, state) in ensemble.components() {
        let mut v = [C64::ZERO; 16];
        for (basis, amp) in state.terms() {
            if basis.total() != 2
                || basis.photons_in(Spatial::C) != 1
                || basis.photons_in(Spatial::D) != 1
            {
                continue;
            }
            let mut pol_c = None;
            let mut pol_d = None;
            for (m, _) in basis.occupations() {
                match m.spatial {
                    Spatial::C => pol_c = Some((m.pol, m.internal)),
                    Spatial::D => pol_d = Some((m.pol, m.internal)),
                    _ => unreachable!("total check excludes other ports"),
                }
            }
            let (pc, ic) = pol_c.expect("one photon in c");
            let (pd, id) = pol_d.expect("one photon in d");
            v[coincidence_index(pc, ic, pd, id)] += amp;
        }
        let component_prob: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        success += weight * component_prob;
        for i in 0..16 {
            if v[i] == C64::ZERO {
                continue;
            }
            for j in 0..16 {
                rho16[i][j] += c64(*weight, 0.0) * v[i] * v[j].conj();
            }
        }
    }
    if success < POSTSELECT_EPS {
        return Err(OpticsError::DegeneratePostselection);
    }
    // Trace out the internal labels of both photons.
    let mut entries = vec![vec![C64::ZERO; 4]; 4];
    for pc in [Pol::H, Pol::V] {
        for pd in [Pol::H, Pol::V] {
            for qc in [Pol::H, Pol::V] {
                for qd in [Pol::H, Pol::V] {
                    let mut sum = C64::ZERO;
                    for ic in [Internal::W0, Internal::WPerp] {
                        for id in [Internal::W0, Internal::WPerp] {
                            sum += rho16[coincidence_index(pc, ic, pd, id)]
                                [coincidence_index(qc, ic, qd, id)];
                        }
                    }
                    let row = 2 * usize::from(pc == Pol::V) + usize::from(pd == Pol::V);
                    let col = 2 * usize::from(qc == Pol::V) + usize::from(qd == Pol::V);
                    entries[row][col] = sum / c64(success, 0.0);
                }
            }
        }
    }
    let rho4 = ComplexMatrix::from_rows(entries)?;
    let rho = validate_density(rho4, 1e-9)?;
    Ok((rho, success))
}

/// Coincidence probability for two same-polarization photons with overlap V
/// colliding on a splitter of reflectance R: (R² + T²) − 2RT·V. At R = T it
/// reduces to (1 − V)/2, and vanishes for perfectly indistinguishable
/// photons (the Mandel dip).
pub fn hom_coincidence_prob(overlap: f64, reflectance: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&overlap));
    debug_assert!(reflectance > 0.0 && reflectance < 1.0);
    let r = reflectance;
    let t = 1.0 - r;
    (r * r + t * t) - 2.0 * r * t * overlap
}
