use std::collections::BTreeMap;

use super::mode::{ModeLabel, Spatial};
use super::OpticsError;
use crate::qmath::C64;

/// Photon-number cap: two pulses with at most two photons each.
pub const MAX_TOTAL_PHOTONS: u32 = 4;

/// An occupation-number basis state |n₁ n₂ …⟩ over labeled modes.
///
/// Canonical form stores only nonzero occupations, so two basis states are
/// equal exactly when their maps are. Total photon number is capped at
/// [`MAX_TOTAL_PHOTONS`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockBasisState {
    occ: BTreeMap<ModeLabel, u32>,
}

impl FockBasisState {
    pub fn vacuum() -> Self {
        FockBasisState {
            occ: BTreeMap::new(),
        }
    }

    /// Build from (mode, count) pairs; zero counts are dropped, repeated
    /// modes accumulate.
    pub fn from_occupations<I>(pairs: I) -> Result<Self, OpticsError>
    where
        I: IntoIterator<Item = (ModeLabel, u32)>,
    {
        let mut occ = BTreeMap::new();
        for (mode, n) in pairs {
            if n > 0 {
                *occ.entry(mode).or_insert(0) += n;
            }
        }
        let state = FockBasisState { occ };
        let total = state.total();
        if total > MAX_TOTAL_PHOTONS {
            return Err(OpticsError::TooManyPhotons {
                total,
                max: MAX_TOTAL_PHOTONS,
            });
        }
        Ok(state)
    }

    pub fn single(mode: ModeLabel) -> Self {
        let mut occ = BTreeMap::new();
        occ.insert(mode, 1);
        FockBasisState { occ }
    }

    pub fn occupation(&self, mode: ModeLabel) -> u32 {
        self.occ.get(&mode).copied().unwrap_or(0)
    }

    pub fn occupations(&self) -> impl Iterator<Item = (ModeLabel, u32)> + '_ {
        self.occ.iter().map(|(&m, &n)| (m, n))
    }

    pub fn total(&self) -> u32 {
        self.occ.values().sum()
    }

    /// Total photon number in one spatial port, summed over polarization and
    /// internal labels.
    pub fn photons_in(&self, spatial: Spatial) -> u32 {
        self.occ
            .iter()
            .filter(|(m, _)| m.spatial == spatial)
            .map(|(_, &n)| n)
            .sum()
    }
}

/// A superposition over occupation-number basis states.
///
/// Terms with negligible amplitude are pruned so the map stays canonical.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonicState {
    terms: BTreeMap<FockBasisState, C64>,
}

const AMPLITUDE_PRUNE: f64 = 1e-14;

impl BosonicState {
    /// Build from (basis state, amplitude) pairs; amplitudes on the same
    /// basis state accumulate, near-zero terms are pruned.
    pub fn from_terms<I>(terms: I) -> Result<Self, OpticsError>
    where
        I: IntoIterator<Item = (FockBasisState, C64)>,
    {
        let mut map: BTreeMap<FockBasisState, C64> = BTreeMap::new();
        for (basis, amp) in terms {
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(OpticsError::Qmath(crate::qmath::QmathError::NonFinite));
            }
            *map.entry(basis).or_insert(C64::ZERO) += amp;
        }
        map.retain(|_, amp| amp.norm() > AMPLITUDE_PRUNE);
        Ok(BosonicState { terms: map })
    }

    /// A single photon in `mode`.
    pub fn single_photon(mode: ModeLabel) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(FockBasisState::single(mode), C64::new(1.0, 0.0));
        BosonicState { terms }
    }

    pub(crate) fn from_map(mut terms: BTreeMap<FockBasisState, C64>) -> Self {
        terms.retain(|_, amp| amp.norm() > AMPLITUDE_PRUNE);
        BosonicState { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockBasisState, C64)> + '_ {
        self.terms.iter().map(|(b, &a)| (b, a))
    }

    pub fn amplitude(&self, basis: &FockBasisState) -> C64 {
        self.terms.get(basis).copied().unwrap_or(C64::ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Error unless the L2 norm is 1 within 1e-12.
    pub fn ensure_normalized(&self) -> Result<(), OpticsError> {
        let dev = (self.norm() - 1.0).abs();
        if dev > 1e-12 {
            return Err(OpticsError::NotNormalized(dev));
        }
        Ok(())
    }
}

/// An incoherent mixture of pure bosonic states.
///
/// Weights are nonnegative and sum to 1 within 1e-12; every component state
/// is normalized. Components may be processed independently and merged in
/// index order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    components: Vec<(f64, BosonicState)>,
}

impl WeightedEnsemble {
    pub fn new(components: Vec<(f64, BosonicState)>) -> Result<Self, OpticsError> {
        let sum: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > 1e-12
        {
            return Err(OpticsError::BadEnsembleWeights(sum));
        }
        for (_, state) in &components {
            state.ensure_normalized()?;
        }
        Ok(WeightedEnsemble { components })
    }

    pub fn components(&self) -> &[(f64, BosonicState)] {
        &self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::mode::{Internal, Pol};
    use crate::qmath::c64;

    fn mode(spatial: Spatial) -> ModeLabel {
        ModeLabel::new(spatial, Pol::H, Internal::W0)
    }

    #[test]
    fn photon_cap_enforced() {
        let err = FockBasisState::from_occupations([(mode(Spatial::A), 3), (mode(Spatial::B), 2)]);
        assert_eq!(
            err.unwrap_err(),
            OpticsError::TooManyPhotons { total: 5, max: 4 }
        );
    }

    #[test]
    fn zero_occupations_are_canonicalized_away() {
        let a = FockBasisState::from_occupations([(mode(Spatial::A), 1), (mode(Spatial::B), 0)])
            .unwrap();
        let b = FockBasisState::single(mode(Spatial::A));
        assert_eq!(a, b);
    }

    #[test]
    fn amplitudes_accumulate_and_cancel() {
        let basis = FockBasisState::single(mode(Spatial::A));
        let state = BosonicState::from_terms([
            (basis.clone(), c64(0.5, 0.0)),
            (basis.clone(), c64(-0.5, 0.0)),
        ])
        .unwrap();
        assert!(state.is_empty());
    }

    #[test]
    fn ensemble_weights_must_sum_to_one() {
        let s = BosonicState::single_photon(mode(Spatial::A));
        let err = WeightedEnsemble::new(vec![(0.6, s.clone()), (0.6, s)]);
        assert!(matches!(err, Err(OpticsError::BadEnsembleWeights(_))));
    }
}
