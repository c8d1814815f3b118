use num_complex::Complex;
use num_traits::Zero;

use super::{Circuit, CircuitError, Gate};
use crate::scalar::Real;

/// Widest circuit the dense simulator accepts unless configured otherwise.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Dense state of `2^width` complex amplitudes with unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    width: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// |0…0⟩ on `width` qubits.
    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    pub fn basis(width: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); 1 << width];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { width, amplitudes }
    }

    /// Checks length is a power of two and the norm is one.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self, CircuitError> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(CircuitError::InvalidState(format!(
                "{} amplitudes is not a power of two",
                amplitudes.len()
            )));
        }
        let width = amplitudes.len().trailing_zeros() as usize;
        let state = Self { width, amplitudes };
        let norm = state.norm();
        if (norm - T::one()).abs() > T::tolerance() {
            return Err(CircuitError::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn from_real(amplitudes: &[T]) -> Result<Self, CircuitError> {
        Self::from_amplitudes(
            amplitudes
                .iter()
                .map(|&a| Complex::new(a, T::zero()))
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest componentwise distance to `other`.
    pub fn max_distance(&self, other: &StateVector<T>) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn apply(&mut self, gate: &Gate<T>) {
        match gate {
            Gate::H { target } => {
                let s = T::FRAC_1_SQRT_2();
                self.apply_real_2x2(*target, 0, 0, [[s, s], [s, -s]]);
            }
            Gate::Ry { target, angle } => {
                let m = ry_matrix(*angle);
                self.apply_real_2x2(*target, 0, 0, m);
            }
            Gate::Cry {
                control,
                target,
                angle,
            } => {
                let m = ry_matrix(*angle);
                self.apply_real_2x2(*target, 1 << control, 1 << control, m);
            }
            Gate::Not { target } => self.flip(*target, 0, 0),
            Gate::Cnot { control, target } => self.flip(*target, 1 << control, 1 << control),
            Gate::Toffoli { controls, target } => {
                let mask = (1 << controls[0]) | (1 << controls[1]);
                self.flip(*target, mask, mask);
            }
            Gate::Mcx { controls, target } => {
                let mut mask = 0;
                let mut value = 0;
                for c in controls {
                    mask |= 1 << c.qubit;
                    if c.on_one {
                        value |= 1 << c.qubit;
                    }
                }
                self.flip(*target, mask, value);
            }
            Gate::Fredkin { control, a, b } => {
                let (c, a, b) = (1usize << control, 1usize << a, 1usize << b);
                for i in 0..self.amplitudes.len() {
                    // visit each swapped pair once, from its (a=1, b=0) member
                    if i & c != 0 && i & a != 0 && i & b == 0 {
                        self.amplitudes.swap(i, i ^ a ^ b);
                    }
                }
            }
        }
    }

    fn flip(&mut self, target: usize, mask: usize, value: usize) {
        let t = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & t == 0 && i & mask == value {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    fn apply_real_2x2(&mut self, target: usize, mask: usize, value: usize, m: [[T; 2]; 2]) {
        let t = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & t == 0 && i & mask == value {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | t];
                self.amplitudes[i] = a0 * m[0][0] + a1 * m[0][1];
                self.amplitudes[i | t] = a0 * m[1][0] + a1 * m[1][1];
            }
        }
    }
}

fn ry_matrix<T: Real>(angle: T) -> [[T; 2]; 2] {
    let half = angle / (T::one() + T::one());
    let (s, c) = half.sin_cos();
    [[c, -s], [s, c]]
}

/// Dense statevector simulator with a width cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub qubit_cap: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

impl Simulator {
    pub fn with_cap(qubit_cap: usize) -> Self {
        Self { qubit_cap }
    }

    pub fn check_width(&self, width: usize) -> Result<(), CircuitError> {
        if width > self.qubit_cap {
            return Err(CircuitError::WidthCapExceeded {
                width,
                cap: self.qubit_cap,
            });
        }
        Ok(())
    }

    /// Run `circuit` from `initial`, or from |0…0⟩ when `None`.
    pub fn simulate<T: Real>(
        &self,
        circuit: &Circuit<T>,
        initial: Option<&StateVector<T>>,
    ) -> Result<StateVector<T>, CircuitError> {
        self.check_width(circuit.width())?;
        let mut state = match initial {
            Some(s) if s.width != circuit.width() => {
                return Err(CircuitError::WidthMismatch {
                    circuit: circuit.width(),
                    state: s.width,
                })
            }
            Some(s) => s.clone(),
            None => StateVector::zero(circuit.width()),
        };
        for gate in circuit.gates() {
            state.apply(gate);
        }
        Ok(state)
    }
}

/// [`Simulator::simulate`] with the default cap.
pub fn simulate<T: Real>(
    circuit: &Circuit<T>,
    initial: Option<&StateVector<T>>,
) -> Result<StateVector<T>, CircuitError> {
    Simulator::default().simulate(circuit, initial)
}

/// Track a single computational basis state through a circuit made only of
/// permutation gates. No width cap applies since no amplitudes are stored.
pub fn simulate_basis<T: Real>(circuit: &Circuit<T>, index: usize) -> Result<usize, CircuitError> {
    if circuit.width() < usize::BITS as usize && index >> circuit.width() != 0 {
        return Err(CircuitError::InvalidState(format!(
            "basis index {index} does not fit {} qubits",
            circuit.width()
        )));
    }
    circuit
        .gates()
        .iter()
        .enumerate()
        .try_fold(index, |i, (n, g)| {
            g.permute(i).ok_or(CircuitError::NonClassicalGate {
                gate: n,
                kind: g.kind(),
            })
        })
}
