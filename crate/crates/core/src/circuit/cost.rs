use std::collections::BTreeMap;

use serde::Serialize;

use super::{Circuit, CircuitError, GateKind};
use crate::scalar::Real;

/// Per-gate quantum cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    entries: BTreeMap<GateKind, u64>,
}

impl CostTable {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// NOT and CNOT cost 1, Toffoli and Fredkin cost 5.
    pub fn standard() -> Self {
        Self::empty()
            .with(GateKind::Not, 1)
            .with(GateKind::Cnot, 1)
            .with(GateKind::Toffoli, 5)
            .with(GateKind::Fredkin, 5)
    }

    pub fn with(mut self, kind: GateKind, cost: u64) -> Self {
        self.entries.insert(kind, cost);
        self
    }

    pub fn get(&self, kind: GateKind) -> Option<u64> {
        self.entries.get(&kind).copied()
    }
}

impl Default for CostTable {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitCost {
    pub quantum_cost: u64,
    pub depth: usize,
    pub ancilla_count: usize,
}

/// Summed gate cost, greedy-layer depth and declared ancilla count.
///
/// Depth places each gate one layer after the latest layer already occupied
/// on any of its qubits, so gates on disjoint qubits share a layer.
pub fn cost_and_depth<T: Real>(
    circuit: &Circuit<T>,
    table: &CostTable,
) -> Result<CircuitCost, CircuitError> {
    let mut quantum_cost = 0;
    let mut busy_until = vec![0usize; circuit.width()];
    let mut depth = 0;
    for gate in circuit.gates() {
        let kind = gate.kind();
        quantum_cost += table.get(kind).ok_or(CircuitError::UnknownGateKind(kind))?;
        let qubits = gate.qubits();
        let layer = qubits.iter().map(|&q| busy_until[q]).max().unwrap_or(0) + 1;
        for q in qubits {
            busy_until[q] = layer;
        }
        depth = depth.max(layer);
    }
    Ok(CircuitCost {
        quantum_cost,
        depth,
        ancilla_count: circuit.ancillas().len(),
    })
}
