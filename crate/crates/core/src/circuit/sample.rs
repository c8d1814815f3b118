use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CircuitError, StateVector};
use crate::scalar::Real;

/// Measurement tallies keyed by bitstring (most significant measured qubit
/// first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Outcome with the most hits; ties go to the lexicographically first key.
    pub fn most_frequent(&self) -> Option<(&str, u64)> {
        let mut best: Option<(&str, u64)> = None;
        for (k, &v) in &self.counts {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("counts serialize")
    }
}

fn key_for(index: usize, measured_desc: &[usize]) -> String {
    measured_desc
        .iter()
        .map(|&q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn sorted_desc(measured: &[usize], width: usize) -> Result<Vec<usize>, CircuitError> {
    if measured.is_empty() {
        return Err(CircuitError::EmptyMeasureSet);
    }
    let mut qs = measured.to_vec();
    qs.sort_unstable_by(|a, b| b.cmp(a));
    qs.dedup();
    if let Some(&q) = qs.iter().find(|&&q| q >= width) {
        return Err(CircuitError::QubitOutOfRange {
            gate: 0,
            qubit: q,
            width,
        });
    }
    Ok(qs)
}

/// Exact outcome distribution over the measured qubits. Outcomes of zero
/// probability are omitted.
pub fn marginal<T: Real>(
    state: &StateVector<T>,
    measured: &[usize],
) -> Result<BTreeMap<String, T>, CircuitError> {
    let qs = sorted_desc(measured, state.width())?;
    let mut out: BTreeMap<String, T> = BTreeMap::new();
    for (i, p) in state.probabilities().into_iter().enumerate() {
        if p > T::zero() {
            *out.entry(key_for(i, &qs)).or_insert_with(T::zero) += p;
        }
    }
    Ok(out)
}

/// Draw `shots` outcomes over `measured` with a ChaCha generator seeded by
/// `seed`. The same inputs always give the same tallies.
pub fn sample<T: Real>(
    state: &StateVector<T>,
    measured: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Counts, CircuitError> {
    if shots == 0 {
        return Err(CircuitError::InvalidState(
            "shots must be at least 1".into(),
        ));
    }
    let dist = marginal(state, measured)?;
    let (keys, weights): (Vec<&String>, Vec<f64>) =
        dist.iter().map(|(k, p)| (k, p.to_f64_lossy())).unzip();
    let picker = WeightedIndex::new(&weights)
        .map_err(|e| CircuitError::InvalidState(format!("cannot sample: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; keys.len()];
    for _ in 0..shots {
        hits[picker.sample(&mut rng)] += 1;
    }
    let counts = keys
        .into_iter()
        .zip(hits)
        .filter(|(_, h)| *h > 0)
        .map(|(k, h)| (k.clone(), h))
        .collect();
    Ok(Counts { shots, counts })
}
