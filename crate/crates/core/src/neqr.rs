//! NEQR image encoding, a ripple comparator, and the binarization circuit
//! that joins them.
//!
//! Binarization layout for a `2^n × 2^n` image of `q`-bit pixels:
//!
//! ```text
//! qubit 0                  comparison ancilla
//! 1 .. 1+q                 threshold register, bit k on qubit 1+k
//! 1+q .. 1+2q              intensity register
//! 1+2q .. 1+2q+2n          position, index = row·2^n + col
//! ```
//!
//! Position qubit `j` holds bit `j` of the position index, so a measured
//! outcome reads as the position bits followed by the ancilla bit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{
    marginal, sample, simulate_basis, Circuit, CircuitError, Control, Counts, Gate, Simulator,
};
use crate::image::GrayImage;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeqrError {
    #[error("NEQR needs a 2^n x 2^n image, got {width}x{height}")]
    NotPowerOfTwoSquare { width: usize, height: usize },
    #[error("threshold {t} does not fit {q} bits")]
    ThresholdOutOfRange { t: u32, q: u8 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("position {0} never observed")]
    MissingPosition(usize),
    #[error("position {position} observed with both ancilla values ({ones} vs {zeros})")]
    ConflictingAncilla {
        position: usize,
        ones: u64,
        zeros: u64,
    },
    #[error("outcome {0:?} does not match the layout")]
    BadOutcome(String),
}

/// Qubit roles of the binarization circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeqrLayout {
    /// Position bits per axis.
    pub n: usize,
    /// Intensity bits.
    pub q: usize,
}

impl NeqrLayout {
    pub fn new(n: usize, q: usize) -> Self {
        Self { n, q }
    }

    /// Layout for `img`, which must be a `2^n × 2^n` square.
    pub fn for_image(img: &GrayImage) -> Result<Self, NeqrError> {
        let (w, h) = (img.width(), img.height());
        if w != h || !w.is_power_of_two() {
            return Err(NeqrError::NotPowerOfTwoSquare {
                width: w,
                height: h,
            });
        }
        Ok(Self::new(
            w.trailing_zeros() as usize,
            usize::from(img.bit_depth()),
        ))
    }

    pub fn width(&self) -> usize {
        2 * (self.n + self.q) + 1
    }

    pub fn ancilla(&self) -> usize {
        0
    }

    pub fn threshold(&self, bit: usize) -> usize {
        1 + bit
    }

    pub fn intensity(&self, bit: usize) -> usize {
        1 + self.q + bit
    }

    pub fn position(&self, bit: usize) -> usize {
        1 + 2 * self.q + bit
    }

    pub fn position_qubits(&self) -> Vec<usize> {
        (0..2 * self.n).map(|j| self.position(j)).collect()
    }
}

/// One bit per pixel; set bits render as the maximum intensity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bit_depth: u8,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bit_depth: u8, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "one bit per pixel");
        Self {
            width,
            height,
            bit_depth,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_gray(&self) -> GrayImage {
        let max = crate::image::max_value(self.bit_depth) as u8;
        let pixels = self.bits.iter().map(|&b| if b { max } else { 0 }).collect();
        GrayImage::new(self.width, self.height, self.bit_depth, pixels).expect("valid binary image")
    }
}

fn check_cap(width: usize, cap: usize) -> Result<(), NeqrError> {
    if width > cap {
        return Err(CircuitError::WidthCapExceeded { width, cap }.into());
    }
    Ok(())
}

/// Position superposition plus, for each pixel, position-controlled MCX
/// gates writing its value into the intensity register.
fn push_encoding<T: Real>(
    circuit: &mut Circuit<T>,
    img: &GrayImage,
    intensity: &[usize],
    position: &[usize],
) {
    for &p in position {
        circuit.push(Gate::H { target: p }).expect("layout fits");
    }
    for (index, &v) in img.pixels().iter().enumerate() {
        let controls: Vec<Control> = position
            .iter()
            .enumerate()
            .map(|(j, &qb)| {
                if index >> j & 1 == 1 {
                    Control::one(qb)
                } else {
                    Control::zero(qb)
                }
            })
            .collect();
        for (bit, &target) in intensity.iter().enumerate() {
            if v >> bit & 1 == 0 {
                continue;
            }
            let gate = if controls.is_empty() {
                Gate::Not { target }
            } else {
                Gate::Mcx {
                    controls: controls.clone(),
                    target,
                }
            };
            circuit.push(gate).expect("layout fits");
        }
    }
}

/// Stand-alone NEQR encoding: intensity on qubits `0..q`, position on
/// `q..q+2n`. Position and intensity are measured, so outcomes read as the
/// position bits followed by the pixel value.
pub fn encode_neqr<T: Real>(img: &GrayImage, cap: usize) -> Result<Circuit<T>, NeqrError> {
    let layout = NeqrLayout::for_image(img)?;
    let (n, q) = (layout.n, layout.q);
    check_cap(2 * n + q, cap)?;
    let mut circuit = Circuit::new(2 * n + q);
    let intensity: Vec<usize> = (0..q).collect();
    let position: Vec<usize> = (q..q + 2 * n).collect();
    push_encoding(&mut circuit, img, &intensity, &position);
    circuit.measure(0..2 * n + q)?;
    Ok(circuit)
}

/// NOT on threshold bit `k` wherever bit `k` of `t` is set; register on
/// qubits `0..q`.
pub fn encode_threshold<T: Real>(t: u32, q: u8) -> Result<Circuit<T>, NeqrError> {
    let mut circuit = Circuit::new(usize::from(q));
    push_threshold(&mut circuit, t, q, 0)?;
    Ok(circuit)
}

fn push_threshold<T: Real>(
    circuit: &mut Circuit<T>,
    t: u32,
    q: u8,
    base: usize,
) -> Result<(), NeqrError> {
    if q == 0 || q > 8 || u64::from(t) >> q != 0 {
        return Err(NeqrError::ThresholdOutOfRange { t, q });
    }
    for bit in 0..usize::from(q) {
        if t >> bit & 1 == 1 {
            circuit
                .push(Gate::Not { target: base + bit })
                .expect("layout fits");
        }
    }
    Ok(())
}

/// Comparator leaving the ancilla at 1 iff intensity > threshold.
///
/// Runs LSB to MSB. `CNOT(i_k → t_k)` marks where the bits differ, then a
/// Fredkin controlled by that mark swaps the running result with `i_k`, so
/// the ancilla ends up holding `i`'s bit at the most significant difference.
/// Both input registers are left scrambled.
pub fn build_comparator<T: Real>(layout: &NeqrLayout) -> Circuit<T> {
    let mut circuit = Circuit::new(layout.width());
    push_comparator(&mut circuit, layout);
    circuit
        .declare_ancillas([layout.ancilla()])
        .expect("layout fits");
    circuit
}

fn push_comparator<T: Real>(circuit: &mut Circuit<T>, layout: &NeqrLayout) {
    for k in 0..layout.q {
        let (i, t) = (layout.intensity(k), layout.threshold(k));
        circuit
            .push(Gate::Cnot {
                control: i,
                target: t,
            })
            .expect("layout fits");
        circuit
            .push(Gate::Fredkin {
                control: t,
                a: layout.ancilla(),
                b: i,
            })
            .expect("layout fits");
    }
}

/// Encoder, threshold encoder and comparator in sequence; position qubits
/// and the ancilla are measured.
pub fn build_binarization_circuit<T: Real>(
    img: &GrayImage,
    t: u32,
    cap: usize,
) -> Result<Circuit<T>, NeqrError> {
    let layout = NeqrLayout::for_image(img)?;
    check_cap(layout.width(), cap)?;
    let mut circuit = Circuit::new(layout.width());
    let intensity: Vec<usize> = (0..layout.q).map(|k| layout.intensity(k)).collect();
    push_encoding(&mut circuit, img, &intensity, &layout.position_qubits());
    push_threshold(&mut circuit, t, img.bit_depth(), layout.threshold(0))?;
    push_comparator(&mut circuit, &layout);
    circuit.declare_ancillas([layout.ancilla()])?;
    let mut measured = layout.position_qubits();
    measured.push(layout.ancilla());
    circuit.measure(measured)?;
    Ok(circuit)
}

/// Per-position ancilla tallies from `(outcome, weight)` pairs.
fn tally<'a, W: Copy + Into<f64>>(
    outcomes: impl IntoIterator<Item = (&'a String, W)>,
    n: usize,
) -> Result<Vec<(f64, f64)>, NeqrError> {
    let positions = 1usize << (2 * n);
    let mut votes = vec![(0.0, 0.0); positions];
    for (key, w) in outcomes {
        if key.len() != 2 * n + 1 || !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(NeqrError::BadOutcome(key.clone()));
        }
        let (pos, anc) = key.split_at(2 * n);
        let pos = if pos.is_empty() {
            0
        } else {
            usize::from_str_radix(pos, 2).expect("binary")
        };
        let w: f64 = w.into();
        if anc == "1" {
            votes[pos].0 += w;
        } else {
            votes[pos].1 += w;
        }
    }
    Ok(votes)
}

fn decide(votes: Vec<(f64, f64)>, n: usize, q: u8) -> Result<BinaryImage, NeqrError> {
    let mut bits = Vec::with_capacity(votes.len());
    for (position, (ones, zeros)) in votes.into_iter().enumerate() {
        let total = ones + zeros;
        if total <= 0.0 {
            return Err(NeqrError::MissingPosition(position));
        }
        // a minority above a third of the position's shots is not noise
        if ones.min(zeros) * 3.0 > total {
            return Err(NeqrError::ConflictingAncilla {
                position,
                ones: ones as u64,
                zeros: zeros as u64,
            });
        }
        bits.push(ones > zeros);
    }
    let side = 1usize << n;
    Ok(BinaryImage::new(side, side, q, bits))
}

/// Majority ancilla value per position from sampled outcomes.
pub fn decode_binary(counts: &Counts, n: usize, q: u8) -> Result<BinaryImage, NeqrError> {
    decide(
        tally(counts.counts.iter().map(|(k, &c)| (k, c as f64)), n)?,
        n,
        q,
    )
}

/// As [`decode_binary`], for exact outcome probabilities.
pub fn decode_distribution<T: Real>(
    dist: &BTreeMap<String, T>,
    n: usize,
    q: u8,
) -> Result<BinaryImage, NeqrError> {
    decide(
        tally(dist.iter().map(|(k, &p)| (k, p.to_f64_lossy())), n)?,
        n,
        q,
    )
}

/// How the full-image circuit is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Simulate the whole NEQR binarization circuit.
    FullCircuit(Readout),
    /// Run the comparator on `2q + 1` qubits once per pixel.
    PerPixel,
    /// Integer comparison.
    Classical,
}

/// Result of the full-circuit route.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRun {
    pub image: BinaryImage,
    /// Outcome probabilities, or shot frequencies when sampled.
    pub outcomes: BTreeMap<String, f64>,
    pub counts: Option<Counts>,
}

/// White wherever intensity > `t`, by the chosen route.
pub fn binarize<T: Real>(
    img: &GrayImage,
    t: u32,
    route: Route,
    simulator: &Simulator,
) -> Result<BinaryImage, NeqrError> {
    match route {
        Route::FullCircuit(readout) => Ok(run_full_circuit::<T>(img, t, readout, simulator)?.image),
        Route::PerPixel => binarize_per_pixel::<T>(img, t),
        Route::Classical => {
            if u64::from(t) >> img.bit_depth() != 0 {
                return Err(NeqrError::ThresholdOutOfRange {
                    t,
                    q: img.bit_depth(),
                });
            }
            let bits = img.pixels().iter().map(|&v| u32::from(v) > t).collect();
            Ok(BinaryImage::new(
                img.width(),
                img.height(),
                img.bit_depth(),
                bits,
            ))
        }
    }
}

pub fn run_full_circuit<T: Real>(
    img: &GrayImage,
    t: u32,
    readout: Readout,
    simulator: &Simulator,
) -> Result<FullRun, NeqrError> {
    let circuit = build_binarization_circuit::<T>(img, t, simulator.qubit_cap)?;
    let n = NeqrLayout::for_image(img)?.n;
    let state = simulator.simulate(&circuit, None)?;
    let measured: Vec<usize> = circuit.measured().iter().copied().collect();
    match readout {
        Readout::Exact => {
            let dist = marginal(&state, &measured)?;
            let image = decode_distribution(&dist, n, img.bit_depth())?;
            let outcomes = dist
                .into_iter()
                .map(|(k, p)| (k, p.to_f64_lossy()))
                .collect();
            Ok(FullRun {
                image,
                outcomes,
                counts: None,
            })
        }
        Readout::Sampled { shots, seed } => {
            let counts = sample(&state, &measured, shots, seed)?;
            let image = decode_binary(&counts, n, img.bit_depth())?;
            let outcomes = counts
                .counts
                .iter()
                .map(|(k, &c)| (k.clone(), c as f64 / shots as f64))
                .collect();
            Ok(FullRun {
                image,
                outcomes,
                counts: Some(counts),
            })
        }
    }
}

fn binarize_per_pixel<T: Real>(img: &GrayImage, t: u32) -> Result<BinaryImage, NeqrError> {
    let q = img.bit_depth();
    let layout = NeqrLayout::new(0, usize::from(q));
    let mut circuit = Circuit::<T>::new(layout.width());
    push_threshold(&mut circuit, t, q, layout.threshold(0))?;
    push_comparator(&mut circuit, &layout);
    let bits = img
        .pixels()
        .iter()
        .map(|&v| {
            let input = (v as usize) << layout.intensity(0);
            simulate_basis(&circuit, input).map(|out| out >> layout.ancilla() & 1 == 1)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BinaryImage::new(img.width(), img.height(), q, bits))
}
