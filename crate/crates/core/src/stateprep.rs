//! Amplitude loading of a real probability vector through a binary tree of
//! RY rotations.
//!
//! Each internal node of the tree splits the probability mass of its
//! subtree between the |0⟩ (left) and |1⟩ (right) branch of one qubit. The
//! root acts on the most significant qubit; level `l` acts on qubit
//! `k - 1 - l`, uniformly controlled by the `l` qubits above it.

use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatePrepError {
    #[error("{0} probabilities is not a power of two")]
    BadLength(usize),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("probability {index} is negative or not finite")]
    InvalidProbability { index: usize },
}

/// Rotation angles of a complete binary tree, stored level by level from
/// the root (`angles[0]`), children of node `i` at `2i + 1` and `2i + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTree<T> {
    qubit_count: usize,
    angles: Vec<T>,
}

impl<T: Real> AngleTree<T> {
    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn root(&self) -> Option<T> {
        self.angles.first().copied()
    }

    /// Angles of depth `level`, left to right.
    pub fn level(&self, level: usize) -> &[T] {
        let start = (1 << level) - 1;
        &self.angles[start..start + (1 << level)]
    }
}

/// Rotation angles for loading `probabilities`.
///
/// A node whose left and right subtrees hold masses `p_l` and `p_r` gets
/// `2·asin(√(p_r / (p_l + p_r)))`, or 0 when the node has no mass.
pub fn gen_angles<T: Real>(probabilities: &[T]) -> Result<AngleTree<T>, StatePrepError> {
    let n = probabilities.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(StatePrepError::BadLength(n));
    }
    if let Some(index) = probabilities
        .iter()
        .position(|p| !p.is_finite() || *p < T::zero())
    {
        return Err(StatePrepError::InvalidProbability { index });
    }
    let total: T = probabilities.iter().copied().sum();
    let tol = T::tolerance();
    if (total - T::one()).abs() > tol {
        return Err(StatePrepError::NotNormalized(total.to_string()));
    }

    let qubit_count = n.trailing_zeros() as usize;
    // masses[l] holds the 2^l subtree sums of level l
    let mut masses: Vec<Vec<T>> = vec![probabilities.to_vec()];
    while masses.last().map_or(0, Vec::len) > 1 {
        let below = masses.last().unwrap();
        let above = below.chunks(2).map(|pair| pair[0] + pair[1]).collect();
        masses.push(above);
    }
    masses.reverse();

    let two = T::one() + T::one();
    let mut angles = Vec::with_capacity(n - 1);
    for level in 0..qubit_count {
        for pair in masses[level + 1].chunks(2) {
            let sum = pair[0] + pair[1];
            let angle = if sum > T::zero() {
                let ratio = (pair[1] / sum).min(T::one());
                two * ratio.sqrt().asin()
            } else {
                T::zero()
            };
            angles.push(angle);
        }
    }
    Ok(AngleTree {
        qubit_count,
        angles,
    })
}

/// Circuit that maps |0…0⟩ to `Σ_j √p_j |j⟩` for the tree's probabilities.
///
/// Each level is a uniformly controlled RY, expanded recursively into plain
/// RY rotations conjugated by CNOTs.
pub fn build_load_circuit<T: Real>(tree: &AngleTree<T>) -> Circuit<T> {
    let k = tree.qubit_count;
    let mut circuit = Circuit::new(k);
    for level in 0..k {
        let target = k - 1 - level;
        let controls: Vec<usize> = (target + 1..k).rev().collect();
        uniformly_controlled_ry(&mut circuit, &controls, target, tree.level(level));
    }
    circuit
}

/// `angles[j]` is applied when the controls read `j`, with `controls[0]` the
/// most significant bit of `j`.
fn uniformly_controlled_ry<T: Real>(
    circuit: &mut Circuit<T>,
    controls: &[usize],
    target: usize,
    angles: &[T],
) {
    let Some((&first, rest)) = controls.split_first() else {
        circuit
            .push(Gate::Ry {
                target,
                angle: angles[0],
            })
            .expect("qubits within width");
        return;
    };
    let half = angles.len() / 2;
    let two = T::one() + T::one();
    let (low, high) = angles.split_at(half);
    let sum: Vec<T> = low.iter().zip(high).map(|(a, b)| (*a + *b) / two).collect();
    let diff: Vec<T> = low.iter().zip(high).map(|(a, b)| (*a - *b) / two).collect();
    uniformly_controlled_ry(circuit, rest, target, &sum);
    circuit
        .push(Gate::Cnot {
            control: first,
            target,
        })
        .expect("qubits within width");
    // X·RY(θ)·X = RY(-θ): the second half subtracts when `first` is set
    uniformly_controlled_ry(circuit, rest, target, &diff);
    circuit
        .push(Gate::Cnot {
            control: first,
            target,
        })
        .expect("qubits within width");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::simulate;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn case_one_angles() {
        let tree = gen_angles(&[0.2f64, 0.6, 0.15, 0.05]).unwrap();
        assert!((tree.root().unwrap() - 0.927_295_218).abs() < 1e-9);
        assert!((tree.level(1)[0] - 2.0 * FRAC_PI_3).abs() < 1e-12);
        assert!((tree.level(1)[1] - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn uniform_and_point_masses() {
        let tree = gen_angles(&[0.25; 4]).unwrap();
        assert!(tree.angles().iter().all(|a| (a - FRAC_PI_2).abs() < 1e-12));
        let tree = gen_angles(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(tree.angles().iter().all(|&a| a == 0.0));
        let tree = gen_angles(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(tree
            .angles()
            .iter()
            .all(|&a| a == 0.0 || (a - PI).abs() < 1e-12));
    }

    #[test]
    fn zero_angles_leave_ground_state() {
        let tree = gen_angles(&[1.0f64, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let state = simulate(&build_load_circuit(&tree), None).unwrap();
        assert!((state.amplitude(0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loads_case_one_state() {
        let p = [0.2f64, 0.6, 0.15, 0.05];
        let state = simulate(&build_load_circuit(&gen_angles(&p).unwrap()), None).unwrap();
        for (j, pj) in p.iter().enumerate() {
            let a = state.amplitude(j);
            assert!((a.re - pj.sqrt()).abs() < 1e-9, "entry {j}");
            assert!(a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn single_entry_vector() {
        let tree = gen_angles(&[1.0]).unwrap();
        assert_eq!(tree.qubit_count(), 0);
        assert!(tree.angles().is_empty());
        let state = simulate(&build_load_circuit(&tree), None).unwrap();
        assert_eq!(state.amplitudes().len(), 1);
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            gen_angles::<f64>(&[0.5, 0.3, 0.2]),
            Err(StatePrepError::BadLength(3))
        );
        assert_eq!(gen_angles::<f64>(&[]), Err(StatePrepError::BadLength(0)));
        assert!(matches!(
            gen_angles(&[0.5, 0.4]),
            Err(StatePrepError::NotNormalized(_))
        ));
        assert_eq!(
            gen_angles(&[1.5, -0.5]),
            Err(StatePrepError::InvalidProbability { index: 1 })
        );
    }

    #[test]
    fn single_precision_round_trip() {
        let p = [0.1f32, 0.2, 0.3, 0.4];
        let state = simulate(&build_load_circuit(&gen_angles(&p).unwrap()), None).unwrap();
        for (j, pj) in p.iter().enumerate() {
            assert!((state.amplitude(j).norm_sqr() - pj).abs() < 1e-5);
        }
    }
}
