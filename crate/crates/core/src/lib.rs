//! Histogram thresholding through Gaussian unsharp measurements on a
//! simulated quantum register, NEQR binarization with a reversible
//! comparator, and classical baselines for comparison.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod baselines;
pub mod circuit;
pub mod histogram;
pub mod image;
pub mod metrics;
pub mod neqr;
pub mod povm;
pub mod scalar;
pub mod stateprep;
pub mod thresholding;

pub use baselines::{multi_otsu, otsu, BaselineError};
pub use circuit::{
    cost_and_depth, sample, simulate, simulate_basis, Circuit, CircuitCost, CircuitError,
    CostTable, Counts, Gate, GateKind, Simulator, StateVector,
};
pub use histogram::{
    compute_histogram, detect_peaks, Histogram, HistogramError, Peak, PeakConfig, PeakSet,
};
pub use image::{load_pgm, save_pgm, GrayImage, ImageError};
pub use metrics::{psnr, ssim, MetricsError, MetricsReport, SsimConfig};
pub use neqr::{
    binarize, build_binarization_circuit, build_comparator, decode_binary, encode_neqr,
    encode_threshold, BinaryImage, NeqrError, NeqrLayout, Readout, Route,
};
pub use povm::{
    apply_effect, build_support_state, build_uniform_state, AmplitudeMap, GaussianEffect,
    IntensityBasis, PovmError,
};
pub use scalar::Real;
pub use stateprep::{build_load_circuit, gen_angles, AngleTree, StatePrepError};
pub use thresholding::{
    compute_thresholds, quantize, LevelRule, Mode, Provenance, Threshold, ThresholdConfig,
    ThresholdError, ThresholdSet,
};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type Circuit64 = Circuit<f64>;
pub type Circuit32 = Circuit<f32>;
pub type AmplitudeMap64 = AmplitudeMap<f64>;
pub type AmplitudeMap32 = AmplitudeMap<f32>;
pub type GaussianEffect64 = GaussianEffect<f64>;
pub type AngleTree64 = AngleTree<f64>;
pub type MetricsReport64 = MetricsReport<f64>;
