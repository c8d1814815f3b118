//! Gaussian effect operators acting on an intensity superposition.
//!
//! An effect centred on intensity `i` with width `δ` is diagonal in the
//! intensity basis with weight `exp(-(i - v)² / 2δ²) / √(2πδ²)` on the basis
//! state that encodes intensity `v`. Applying it to the superposition of the
//! image's intensities and renormalizing concentrates amplitude near `i`; as
//! `δ → 0` it tends to a projector onto `i`.

use serde::Serialize;
use thiserror::Error;

use crate::histogram::Histogram;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PovmError {
    #[error("intensity basis is empty")]
    EmptyBasis,
    #[error("invalid intensity basis: {0}")]
    InvalidBasis(String),
    #[error("effect and state use different intensity bases")]
    BasisMismatch,
    #[error("invalid effect: {0}")]
    InvalidEffect(String),
    #[error("state has no weight on any basis entry")]
    ZeroNorm,
    #[error("at least one effect is required")]
    NoEffects,
}

/// Ordered intensities and their encoding as basis indices: the `m`-th
/// intensity is the basis state `|m⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntensityBasis {
    intensities: Vec<u32>,
    bit_depth: u8,
}

impl IntensityBasis {
    pub fn new(intensities: Vec<u32>, bit_depth: u8) -> Result<Self, PovmError> {
        if intensities.is_empty() {
            return Err(PovmError::EmptyBasis);
        }
        if !(1..=8).contains(&bit_depth) {
            return Err(PovmError::InvalidBasis(format!("bit depth {bit_depth}")));
        }
        if intensities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PovmError::InvalidBasis(
                "intensities must be strictly ascending".into(),
            ));
        }
        let limit = 1u32 << bit_depth;
        if let Some(v) = intensities.iter().find(|&&v| v >= limit) {
            return Err(PovmError::InvalidBasis(format!(
                "intensity {v} needs more than {bit_depth} bits"
            )));
        }
        Ok(Self {
            intensities,
            bit_depth,
        })
    }

    /// Every intensity `0..2^bit_depth`.
    pub fn full_range(bit_depth: u8) -> Result<Self, PovmError> {
        if !(1..=8).contains(&bit_depth) {
            return Err(PovmError::InvalidBasis(format!("bit depth {bit_depth}")));
        }
        Self::new((0..1u32 << bit_depth).collect(), bit_depth)
    }

    /// Only the intensities that occur in the histogram.
    pub fn present(hist: &Histogram) -> Result<Self, PovmError> {
        Self::new(hist.present(), hist.bit_depth())
    }

    pub fn intensities(&self) -> &[u32] {
        &self.intensities
    }

    pub fn intensity(&self, index: usize) -> u32 {
        self.intensities[index]
    }

    pub fn index_of(&self, intensity: u32) -> Option<usize> {
        self.intensities.binary_search(&intensity).ok()
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Qubits needed to index the basis, `ceil(log2(len))`.
    pub fn qubit_count(&self) -> usize {
        self.len().next_power_of_two().trailing_zeros() as usize
    }

    /// Basis label of `index`, most significant qubit first.
    pub fn label(&self, index: usize) -> String {
        let n = self.qubit_count();
        (0..n)
            .rev()
            .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Real, nonnegative amplitudes over an intensity basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMap<T> {
    basis: IntensityBasis,
    amplitudes: Vec<T>,
    normalized: bool,
}

impl<T: Real> AmplitudeMap<T> {
    /// Amplitudes must be finite and nonnegative, one per basis entry.
    pub fn new(basis: IntensityBasis, amplitudes: Vec<T>) -> Result<Self, PovmError> {
        if amplitudes.len() != basis.len() {
            return Err(PovmError::BasisMismatch);
        }
        if amplitudes.iter().any(|a| !a.is_finite() || *a < T::zero()) {
            return Err(PovmError::InvalidEffect(
                "amplitudes must be finite and nonnegative".into(),
            ));
        }
        let normalized = (norm(&amplitudes) - T::one()).abs() <= T::tolerance();
        Ok(Self {
            basis,
            amplitudes,
            normalized,
        })
    }

    pub fn basis(&self) -> &IntensityBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }

    /// Squared amplitudes scaled to sum to one.
    pub fn probabilities(&self) -> Vec<T> {
        let total: T = self.amplitudes.iter().map(|a| *a * *a).sum();
        self.amplitudes.iter().map(|a| *a * *a / total).collect()
    }

    /// [`Self::probabilities`] zero-padded to `2^qubit_count` entries.
    pub fn padded_probabilities(&self) -> Vec<T> {
        let mut p = self.probabilities();
        p.resize(1 << self.basis.qubit_count(), T::zero());
        p
    }

    pub fn amplitude_of(&self, intensity: u32) -> Option<T> {
        self.basis.index_of(intensity).map(|i| self.amplitudes[i])
    }
}

fn norm<T: Real>(values: &[T]) -> T {
    values.iter().map(|a| *a * *a).sum::<T>().sqrt()
}

/// Unnormalized `|I⟩`: amplitude 1 on every basis entry.
pub fn build_uniform_state<T: Real>(basis: &IntensityBasis) -> Result<AmplitudeMap<T>, PovmError> {
    if basis.is_empty() {
        return Err(PovmError::EmptyBasis);
    }
    AmplitudeMap::new(basis.clone(), vec![T::one(); basis.len()])
}

/// Amplitude 1 on intensities that occur in `hist`, 0 elsewhere.
pub fn build_support_state<T: Real>(
    basis: &IntensityBasis,
    hist: &Histogram,
) -> Result<AmplitudeMap<T>, PovmError> {
    let amps = basis
        .intensities()
        .iter()
        .map(|&v| {
            if hist.counts().get(v as usize).copied().unwrap_or(0) > 0 {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    AmplitudeMap::new(basis.clone(), amps)
}

/// Diagonal Gaussian effect over an intensity basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEffect<T> {
    mean_intensity: T,
    width: T,
    basis: IntensityBasis,
}

impl<T: Real> GaussianEffect<T> {
    pub fn new(mean_intensity: T, width: T, basis: IntensityBasis) -> Result<Self, PovmError> {
        if !(width > T::zero() && width.is_finite()) {
            return Err(PovmError::InvalidEffect(format!(
                "width {width} must be positive"
            )));
        }
        let upper = T::from_usize_lossy(1 << basis.bit_depth());
        if !(mean_intensity >= T::zero() && mean_intensity < upper) {
            return Err(PovmError::InvalidEffect(format!(
                "mean {mean_intensity} outside [0, {upper})"
            )));
        }
        Ok(Self {
            mean_intensity,
            width,
            basis,
        })
    }

    pub fn mean_intensity(&self) -> T {
        self.mean_intensity
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn basis(&self) -> &IntensityBasis {
        &self.basis
    }

    /// Diagonal entry for intensity `v`, including the `1/√(2πδ²)` prefactor.
    pub fn weight(&self, v: u32) -> T {
        let two = T::one() + T::one();
        let d = T::from_u32(v).expect("u32 fits") - self.mean_intensity;
        let var = self.width * self.width;
        (-(d * d) / (two * var)).exp() / (two * T::PI() * var).sqrt()
    }
}

/// Apply the effect to `state` and renormalize to unit L2 norm.
///
/// The Gaussian is evaluated at the intensity each basis index encodes, not
/// at the index. Entries with zero amplitude stay zero.
pub fn apply_effect<T: Real>(
    effect: &GaussianEffect<T>,
    state: &AmplitudeMap<T>,
) -> Result<AmplitudeMap<T>, PovmError> {
    if effect.basis != state.basis {
        return Err(PovmError::BasisMismatch);
    }
    let amplitudes = weighted_amplitudes(
        effect.mean_intensity,
        effect.width,
        state.basis.intensities(),
        &state.amplitudes,
    )?;
    Ok(AmplitudeMap {
        basis: state.basis.clone(),
        amplitudes,
        normalized: true,
    })
}

/// Gaussian-weighted, unit-norm amplitudes. Weights are shifted in log space
/// by the largest exponent among occupied entries, so narrow widths do not
/// underflow to an all-zero state.
pub(crate) fn weighted_amplitudes<T: Real>(
    mean: T,
    width: T,
    intensities: &[u32],
    amps: &[T],
) -> Result<Vec<T>, PovmError> {
    let two = T::one() + T::one();
    let denom = two * width * width;
    let exponent = |v: u32| {
        let d = T::from_u32(v).expect("u32 fits") - mean;
        -(d * d) / denom
    };
    let top = intensities
        .iter()
        .zip(amps)
        .filter(|(_, a)| **a > T::zero())
        .map(|(&v, _)| exponent(v))
        .fold(None, |acc: Option<T>, e| Some(acc.map_or(e, |m| m.max(e))))
        .ok_or(PovmError::ZeroNorm)?;
    let raw: Vec<T> = intensities
        .iter()
        .zip(amps)
        .map(|(&v, &a)| {
            if a > T::zero() {
                a * (exponent(v) - top).exp()
            } else {
                T::zero()
            }
        })
        .collect();
    let n = norm(&raw);
    if n == T::zero() {
        return Err(PovmError::ZeroNorm);
    }
    Ok(raw.into_iter().map(|a| a / n).collect())
}

/// Largest deviation of `Σ_k E_k` from the identity over the shared basis.
/// Diagnostic only: a set of Gaussian effects need not be a complete POVM.
pub fn effect_sum_check<T: Real>(effects: &[GaussianEffect<T>]) -> Result<T, PovmError> {
    let first = effects.first().ok_or(PovmError::NoEffects)?;
    if effects.iter().any(|e| e.basis != first.basis) {
        return Err(PovmError::BasisMismatch);
    }
    Ok(first
        .basis
        .intensities()
        .iter()
        .map(|&v| {
            let total: T = effects.iter().map(|e| e.weight(v)).sum();
            (total - T::one()).abs()
        })
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_one_basis() -> IntensityBasis {
        IntensityBasis::new(vec![63, 100, 141, 155], 8).unwrap()
    }

    #[test]
    fn uniform_state_is_unnormalized_ones() {
        let s: AmplitudeMap<f64> = build_uniform_state(&case_one_basis()).unwrap();
        assert_eq!(s.amplitudes(), &[1.0; 4]);
        assert!(!s.is_normalized());

        let single = IntensityBasis::new(vec![9], 8).unwrap();
        let s: AmplitudeMap<f64> = build_uniform_state(&single).unwrap();
        assert_eq!(s.amplitudes(), &[1.0]);
        assert!(s.is_normalized());
        assert_eq!(single.qubit_count(), 0);

        let full = IntensityBasis::full_range(8).unwrap();
        let s: AmplitudeMap<f64> = build_uniform_state(&full).unwrap();
        assert_eq!(s.amplitudes().len(), 256);
        assert!(s.amplitudes().iter().all(|&a| a == 1.0));
        assert_eq!(full.qubit_count(), 8);
    }

    #[test]
    fn basis_validation() {
        assert_eq!(IntensityBasis::new(vec![], 8), Err(PovmError::EmptyBasis));
        assert!(IntensityBasis::new(vec![3, 3], 8).is_err());
        assert!(IntensityBasis::new(vec![4], 2).is_err());
        let b = case_one_basis();
        assert_eq!(b.index_of(141), Some(2));
        assert_eq!(b.index_of(142), None);
        assert_eq!(b.label(1), "01");
    }

    #[test]
    fn flat_gaussian_limit() {
        let basis = case_one_basis();
        let effect = GaussianEffect::<f64>::new(100.0, 1e6, basis.clone()).unwrap();
        let out = apply_effect(&effect, &build_uniform_state(&basis).unwrap()).unwrap();
        for a in out.amplitudes() {
            assert!((a - 0.5).abs() < 1e-3);
        }
        assert!(out.is_normalized());
    }

    #[test]
    fn narrow_effect_concentrates() {
        let basis = case_one_basis();
        let effect = GaussianEffect::new(100.0, 1.0, basis.clone()).unwrap();
        let out = apply_effect(&effect, &build_uniform_state(&basis).unwrap()).unwrap();
        // nearest competitor is 37 levels away: weight exp(-37²/2)
        assert!(out.amplitudes()[1] >= 0.9999);

        // far from every entry the log-space shift still yields a state
        let effect = GaussianEffect::<f64>::new(250.0, 0.5, basis.clone()).unwrap();
        let out = apply_effect(&effect, &build_uniform_state(&basis).unwrap()).unwrap();
        assert!((out.amplitudes()[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn absent_entries_stay_zero() {
        let basis = IntensityBasis::full_range(2).unwrap();
        let hist = Histogram::from_counts(vec![3, 0, 5, 0]).unwrap();
        let state: AmplitudeMap<f64> = build_support_state(&basis, &hist).unwrap();
        let effect = GaussianEffect::new(1.0, 1.0, basis).unwrap();
        let out = apply_effect(&effect, &state).unwrap();
        assert_eq!(out.amplitudes()[1], 0.0);
        assert_eq!(out.amplitudes()[3], 0.0);
        assert!((out.amplitudes()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn mismatched_basis_rejected() {
        let effect = GaussianEffect::new(1.0, 1.0, IntensityBasis::full_range(2).unwrap()).unwrap();
        let state: AmplitudeMap<f64> = build_uniform_state(&case_one_basis()).unwrap();
        assert_eq!(apply_effect(&effect, &state), Err(PovmError::BasisMismatch));
        let zero = AmplitudeMap::new(IntensityBasis::full_range(2).unwrap(), vec![0.0; 4]).unwrap();
        assert_eq!(apply_effect(&effect, &zero), Err(PovmError::ZeroNorm));
    }

    #[test]
    fn effect_validation() {
        let b = case_one_basis();
        assert!(GaussianEffect::new(100.0, 0.0, b.clone()).is_err());
        assert!(GaussianEffect::new(256.0, 1.0, b.clone()).is_err());
        assert!(GaussianEffect::new(-1.0, 1.0, b).is_err());
    }

    #[test]
    fn single_effect_is_not_a_partition() {
        let b = case_one_basis();
        let dev = effect_sum_check(&[GaussianEffect::new(100.0, 35.0, b).unwrap()]).unwrap();
        assert!(dev > 0.0);
        assert_eq!(effect_sum_check::<f64>(&[]), Err(PovmError::NoEffects));
    }

    #[test]
    fn unreached_entry_deviates_by_one() {
        // entry 255 is ~255σ away from the only effect, so its column sums to 0
        let b = IntensityBasis::new(vec![0, 255], 8).unwrap();
        let dev = effect_sum_check(&[GaussianEffect::new(0.0, 1.0, b).unwrap()]).unwrap();
        assert_eq!(dev, 1.0);
    }

    proptest::proptest! {
        #[test]
        fn relabeling_permutes_output(
            values in proptest::collection::btree_set(0u32..256, 2..12),
            mean in 0.0f64..255.0,
            width in 1.0f64..80.0,
            seed in proptest::prelude::any::<u64>(),
        ) {
            let values: Vec<u32> = values.into_iter().collect();
            let amps: Vec<f64> = values.iter().map(|v| 1.0 + f64::from(v % 7)).collect();
            let base = weighted_amplitudes(mean, width, &values, &amps).unwrap();
            // deterministic shuffle of the intensity <-> index assignment
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by_key(|&i| (i as u64).wrapping_mul(seed | 1).rotate_left(17));
            let vs: Vec<u32> = order.iter().map(|&i| values[i]).collect();
            let az: Vec<f64> = order.iter().map(|&i| amps[i]).collect();
            let moved = weighted_amplitudes(mean, width, &vs, &az).unwrap();
            for (slot, &i) in order.iter().enumerate() {
                proptest::prop_assert!((moved[slot] - base[i]).abs() < 1e-12);
            }
        }
    }
}
