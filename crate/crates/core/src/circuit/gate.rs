use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A control line of a multi-controlled gate. `on_one == false` means the
/// gate fires when the control qubit is |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub on_one: bool,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: true,
        }
    }

    pub fn zero(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T> {
    Not {
        target: usize,
    },
    H {
        target: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    Mcx {
        controls: Vec<Control>,
        target: usize,
    },
    Ry {
        target: usize,
        angle: T,
    },
    Cry {
        control: usize,
        target: usize,
        angle: T,
    },
    /// Controlled swap of `a` and `b`.
    Fredkin {
        control: usize,
        a: usize,
        b: usize,
    },
}

/// Gate family used for cost lookup. MCX is keyed by its control count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Not,
    H,
    Cnot,
    Toffoli,
    Mcx(usize),
    Ry,
    Cry,
    Fredkin,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Not => f.write_str("NOT"),
            GateKind::H => f.write_str("H"),
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Toffoli => f.write_str("TOFFOLI"),
            GateKind::Mcx(k) => write!(f, "MCX({k})"),
            GateKind::Ry => f.write_str("RY"),
            GateKind::Cry => f.write_str("CRY"),
            GateKind::Fredkin => f.write_str("FREDKIN"),
        }
    }
}

impl<T: Real> Gate<T> {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Not { .. } => GateKind::Not,
            Gate::H { .. } => GateKind::H,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Toffoli { .. } => GateKind::Toffoli,
            Gate::Mcx { controls, .. } => GateKind::Mcx(controls.len()),
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Cry { .. } => GateKind::Cry,
            Gate::Fredkin { .. } => GateKind::Fredkin,
        }
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Not { target } | Gate::H { target } | Gate::Ry { target, .. } => vec![*target],
            Gate::Cnot { control, target }
            | Gate::Cry {
                control, target, ..
            } => vec![*control, *target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Mcx { controls, target } => {
                let mut q: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
                q.push(*target);
                q
            }
            Gate::Fredkin { control, a, b } => vec![*control, *a, *b],
        }
    }

    /// True for gates that permute computational basis states.
    pub fn is_classical(&self) -> bool {
        !matches!(self, Gate::H { .. } | Gate::Ry { .. } | Gate::Cry { .. })
    }

    pub fn inverse(&self) -> Self {
        match self {
            Gate::Ry { target, angle } => Gate::Ry {
                target: *target,
                angle: -*angle,
            },
            Gate::Cry {
                control,
                target,
                angle,
            } => Gate::Cry {
                control: *control,
                target: *target,
                angle: -*angle,
            },
            other => other.clone(),
        }
    }

    /// Apply a classical gate to a basis-state index. Returns `None` for
    /// gates that create superpositions.
    pub fn permute(&self, index: usize) -> Option<usize> {
        let bit = |q: usize| index >> q & 1 == 1;
        Some(match self {
            Gate::Not { target } => index ^ (1 << target),
            Gate::Cnot { control, target } => {
                if bit(*control) {
                    index ^ (1 << target)
                } else {
                    index
                }
            }
            Gate::Toffoli { controls, target } => {
                if bit(controls[0]) && bit(controls[1]) {
                    index ^ (1 << target)
                } else {
                    index
                }
            }
            Gate::Mcx { controls, target } => {
                if controls.iter().all(|c| bit(c.qubit) == c.on_one) {
                    index ^ (1 << target)
                } else {
                    index
                }
            }
            Gate::Fredkin { control, a, b } => {
                if bit(*control) && bit(*a) != bit(*b) {
                    index ^ (1 << a) ^ (1 << b)
                } else {
                    index
                }
            }
            Gate::H { .. } | Gate::Ry { .. } | Gate::Cry { .. } => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fredkin_truth_table() {
        let g: Gate<f64> = Gate::Fredkin {
            control: 2,
            a: 1,
            b: 0,
        };
        // qubit 2 is the control; targets 1 and 0 swap only when it is set
        let expected = [0b000, 0b001, 0b010, 0b011, 0b100, 0b110, 0b101, 0b111];
        for (input, want) in expected.iter().enumerate() {
            assert_eq!(g.permute(input), Some(*want), "input {input:03b}");
        }
    }

    #[test]
    fn mcx_polarity() {
        let g: Gate<f64> = Gate::Mcx {
            controls: vec![Control::one(1), Control::zero(2)],
            target: 0,
        };
        assert_eq!(g.permute(0b010), Some(0b011));
        assert_eq!(g.permute(0b110), Some(0b110));
        assert_eq!(g.permute(0b000), Some(0b000));
        assert_eq!(g.kind(), GateKind::Mcx(2));
    }

    #[test]
    fn inverse_negates_rotations() {
        let g = Gate::Cry {
            control: 0,
            target: 1,
            angle: 0.5,
        };
        assert_eq!(
            g.inverse(),
            Gate::Cry {
                control: 0,
                target: 1,
                angle: -0.5
            }
        );
        let h: Gate<f64> = Gate::H { target: 3 };
        assert_eq!(h.inverse(), h);
        assert!(h.permute(0).is_none());
    }
}
