//! Gate-level circuits, exact statevector simulation, seeded shot sampling
//! and quantum-cost accounting.
//!
//! Qubit 0 is the least significant bit of a basis-state index. Bitstrings
//! produced by sampling are printed most-significant measured qubit first.

mod cost;
mod gate;
mod sample;
mod state;
mod text;

use std::collections::BTreeSet;

use thiserror::Error;

pub use cost::{cost_and_depth, CircuitCost, CostTable};
pub use gate::{Control, Gate, GateKind};
pub use sample::{marginal, sample, Counts};
pub use state::{simulate, simulate_basis, Simulator, StateVector, DEFAULT_QUBIT_CAP};

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} uses qubit {qubit} outside a {width}-qubit circuit")]
    QubitOutOfRange {
        gate: usize,
        qubit: usize,
        width: usize,
    },
    #[error("gate {gate} uses qubit {qubit} more than once")]
    DuplicateQubit { gate: usize, qubit: usize },
    #[error("gate {gate} has a non-finite angle")]
    NonFiniteAngle { gate: usize },
    #[error("state has {state} qubits but the circuit has {circuit}")]
    WidthMismatch { circuit: usize, state: usize },
    #[error("{width} qubits exceeds the simulator cap of {cap}")]
    WidthCapExceeded { width: usize, cap: usize },
    #[error("no qubits selected for measurement")]
    EmptyMeasureSet,
    #[error("cost table has no entry for {0}")]
    UnknownGateKind(GateKind),
    #[error("gate {gate} ({kind}) is not a basis permutation")]
    NonClassicalGate { gate: usize, kind: GateKind },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Ordered gate list over `width` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    width: usize,
    gates: Vec<Gate<T>>,
    measured: BTreeSet<usize>,
    ancillas: BTreeSet<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
            measured: BTreeSet::new(),
            ancillas: BTreeSet::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn measured(&self) -> &BTreeSet<usize> {
        &self.measured
    }

    pub fn ancillas(&self) -> &BTreeSet<usize> {
        &self.ancillas
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<&mut Self, CircuitError> {
        self.check_gate(self.gates.len(), &gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Append every gate of `other`, which must not be wider than `self`.
    /// Measured and ancilla sets are merged.
    pub fn extend_from(&mut self, other: &Circuit<T>) -> Result<&mut Self, CircuitError> {
        if other.width > self.width {
            return Err(CircuitError::WidthMismatch {
                circuit: self.width,
                state: other.width,
            });
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        self.measured.extend(other.measured.iter().copied());
        self.ancillas.extend(other.ancillas.iter().copied());
        Ok(self)
    }

    pub fn measure(
        &mut self,
        qubits: impl IntoIterator<Item = usize>,
    ) -> Result<&mut Self, CircuitError> {
        for q in qubits {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange {
                    gate: self.gates.len(),
                    qubit: q,
                    width: self.width,
                });
            }
            self.measured.insert(q);
        }
        Ok(self)
    }

    pub fn declare_ancillas(
        &mut self,
        qubits: impl IntoIterator<Item = usize>,
    ) -> Result<&mut Self, CircuitError> {
        for q in qubits {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange {
                    gate: self.gates.len(),
                    qubit: q,
                    width: self.width,
                });
            }
            self.ancillas.insert(q);
        }
        Ok(self)
    }

    /// Gate-wise inverse: reversed order, each gate inverted.
    pub fn inverse(&self) -> Self {
        Self {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            measured: self.measured.clone(),
            ancillas: self.ancillas.clone(),
        }
    }

    pub fn is_classical(&self) -> bool {
        self.gates.iter().all(Gate::is_classical)
    }

    fn check_gate(&self, index: usize, gate: &Gate<T>) -> Result<(), CircuitError> {
        let qubits = gate.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange {
                    gate: index,
                    qubit: q,
                    width: self.width,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit {
                    gate: index,
                    qubit: q,
                });
            }
        }
        match gate {
            Gate::Ry { angle, .. } | Gate::Cry { angle, .. } if !angle.is_finite() => {
                Err(CircuitError::NonFiniteAngle { gate: index })
            }
            _ => Ok(()),
        }
    }
}
