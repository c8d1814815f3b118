//! Threshold extraction: one Gaussian effect per histogram peak, loaded into
//! a register and measured, then thresholds where adjacent peak
//! distributions cross. Also maps an image onto the resulting levels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{sample, CircuitError, Simulator, DEFAULT_QUBIT_CAP};
use crate::histogram::{
    compute_histogram, detect_peaks, Histogram, HistogramError, PeakConfig, PeakSet,
};
use crate::image::GrayImage;
use crate::povm::{apply_effect, build_support_state, GaussianEffect, IntensityBasis, PovmError};
use crate::scalar::Real;
use crate::stateprep::{build_load_circuit, gen_angles, StatePrepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error(transparent)]
    Histogram(#[from] HistogramError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    StatePrep(#[from] StatePrepError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("no intensity carries mass in both peak {0} and peak {1}")]
    EmptyOverlap(usize, usize),
    #[error("measurement is empty")]
    EmptyMeasurement,
    #[error("invalid threshold set: {0}")]
    InvalidSet(String),
}

/// How peak distributions are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    /// Exact probabilities from the simulated statevector.
    Exact,
    /// Shot tallies; peak `k` is sampled with seed `seed + k`.
    Sampled { shots: u64, seed: u64 },
    /// Not produced by the circuit pipeline.
    Classical,
}

/// Where a threshold came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Provenance {
    /// Crossing of peaks `k` and `k + 1`.
    PeakPair(usize),
    UnimodalArgmax,
    /// Shared valley of peaks `k` and `k + 1` (no overlapping support).
    ValleyFallback(usize),
    /// Single-intensity image.
    Degenerate,
    Otsu,
    MultiOtsu,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::PeakPair(k) => write!(f, "peaks {}-{}", k, k + 1),
            Provenance::UnimodalArgmax => f.write_str("unimodal-argmax"),
            Provenance::ValleyFallback(k) => write!(f, "valley {}-{}", k, k + 1),
            Provenance::Degenerate => f.write_str("degenerate"),
            Provenance::Otsu => f.write_str("otsu"),
            Provenance::MultiOtsu => f.write_str("multi-otsu"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let pair = |rest: &str| -> Result<usize, String> {
            let (a, b) = rest
                .split_once('-')
                .ok_or_else(|| format!("bad pair {rest:?}"))?;
            let a: usize = a.parse().map_err(|_| format!("bad pair {rest:?}"))?;
            let b: usize = b.parse().map_err(|_| format!("bad pair {rest:?}"))?;
            if b != a + 1 {
                return Err(format!("peaks {a} and {b} are not adjacent"));
            }
            Ok(a)
        };
        match s {
            "unimodal-argmax" => Ok(Provenance::UnimodalArgmax),
            "degenerate" => Ok(Provenance::Degenerate),
            "otsu" => Ok(Provenance::Otsu),
            "multi-otsu" => Ok(Provenance::MultiOtsu),
            _ => {
                if let Some(rest) = s.strip_prefix("peaks ") {
                    pair(rest).map(Provenance::PeakPair)
                } else if let Some(rest) = s.strip_prefix("valley ") {
                    pair(rest).map(Provenance::ValleyFallback)
                } else {
                    Err(format!("unknown provenance {s:?}"))
                }
            }
        }
    }
}

impl From<Provenance> for String {
    fn from(p: Provenance) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for Provenance {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: u32,
    pub provenance: Provenance,
}

/// Strictly ascending thresholds for a `bit_depth`-bit image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThresholdSetDoc")]
pub struct ThresholdSet {
    mode: Mode,
    bit_depth: u8,
    thresholds: Vec<Threshold>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    peak_means: Vec<u32>,
}

#[derive(Deserialize)]
struct ThresholdSetDoc {
    mode: Mode,
    #[serde(default = "eight")]
    bit_depth: u8,
    thresholds: Vec<Threshold>,
    #[serde(default)]
    peak_means: Vec<u32>,
}

fn eight() -> u8 {
    8
}

impl TryFrom<ThresholdSetDoc> for ThresholdSet {
    type Error = ThresholdError;

    fn try_from(doc: ThresholdSetDoc) -> Result<Self, Self::Error> {
        ThresholdSet::new(doc.mode, doc.bit_depth, doc.thresholds)?.with_peak_means(doc.peak_means)
    }
}

impl ThresholdSet {
    pub fn new(
        mode: Mode,
        bit_depth: u8,
        thresholds: Vec<Threshold>,
    ) -> Result<Self, ThresholdError> {
        if !(1..=8).contains(&bit_depth) {
            return Err(ThresholdError::InvalidSet(format!("bit depth {bit_depth}")));
        }
        if thresholds.windows(2).any(|w| w[0].value >= w[1].value) {
            return Err(ThresholdError::InvalidSet(
                "thresholds must be strictly ascending".into(),
            ));
        }
        let max = crate::image::max_value(bit_depth);
        if let Some(t) = thresholds.iter().find(|t| t.value > max) {
            return Err(ThresholdError::InvalidSet(format!(
                "threshold {} exceeds {max}",
                t.value
            )));
        }
        Ok(Self {
            mode,
            bit_depth,
            thresholds,
            peak_means: Vec::new(),
        })
    }

    /// Attach the peak means used by [`LevelRule::PeakValue`].
    pub fn with_peak_means(mut self, means: Vec<u32>) -> Result<Self, ThresholdError> {
        if means.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ThresholdError::InvalidSet(
                "peak means must be strictly ascending".into(),
            ));
        }
        self.peak_means = means;
        Ok(self)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn thresholds(&self) -> &[Threshold] {
        &self.thresholds
    }

    pub fn values(&self) -> Vec<u32> {
        self.thresholds.iter().map(|t| t.value).collect()
    }

    pub fn peak_means(&self) -> &[u32] {
        &self.peak_means
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("threshold set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ThresholdError> {
        serde_json::from_str(text).map_err(|e| ThresholdError::InvalidSet(e.to_string()))
    }
}

/// Outcome distribution of one peak's register, indexed like its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakMeasurement<T> {
    pub peak: usize,
    pub basis: IntensityBasis,
    pub probabilities: Vec<T>,
    /// `Some` when the probabilities are shot frequencies.
    pub shots: Option<u64>,
}

impl<T: Real> PeakMeasurement<T> {
    pub fn probability_of(&self, intensity: u32) -> T {
        self.basis
            .index_of(intensity)
            .map_or(T::zero(), |i| self.probabilities[i])
    }
}

/// Intensity of the most probable basis state; ties go to the lower
/// intensity.
pub fn unimodal_threshold<T: Real>(meas: &PeakMeasurement<T>) -> Result<u32, ThresholdError> {
    let mut best: Option<(usize, T)> = None;
    for (i, &p) in meas.probabilities.iter().enumerate() {
        if p > T::zero() && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((i, p));
        }
    }
    best.map(|(i, _)| meas.basis.intensity(i))
        .ok_or(ThresholdError::EmptyMeasurement)
}

/// Intensity in `[lo, hi)` where the two peak distributions are closest,
/// among intensities both assign nonzero probability. Ties go to the lower
/// intensity.
pub fn crossing_threshold<T: Real>(
    left: &PeakMeasurement<T>,
    right: &PeakMeasurement<T>,
    lo: u32,
    hi: u32,
) -> Result<u32, ThresholdError> {
    if left.basis != right.basis {
        return Err(PovmError::BasisMismatch.into());
    }
    let mut best: Option<(u32, T)> = None;
    for (i, &v) in left.basis.intensities().iter().enumerate() {
        if v < lo || v >= hi {
            continue;
        }
        let (a, b) = (left.probabilities[i], right.probabilities[i]);
        if a > T::zero() && b > T::zero() {
            let gap = (a - b).abs();
            if best.is_none_or(|(_, g)| gap < g) {
                best = Some((v, gap));
            }
        }
    }
    best.map(|(v, _)| v)
        .ok_or(ThresholdError::EmptyOverlap(left.peak, right.peak))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    pub peaks: PeakConfig,
    /// Images with at most this many distinct intensities are treated as a
    /// single peak over a basis of just those intensities.
    pub sparse_levels: usize,
    pub mode: Mode,
    pub qubit_cap: usize,
    /// Use these peaks instead of detecting them.
    pub peak_override: Option<PeakSet>,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            peaks: PeakConfig::default(),
            sparse_levels: 16,
            mode: Mode::Exact,
            qubit_cap: DEFAULT_QUBIT_CAP,
            peak_override: None,
        }
    }
}

/// Everything the pipeline produced on the way to a [`ThresholdSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRun<T> {
    pub set: ThresholdSet,
    /// Peaks the effects were centred on; `None` for a degenerate image.
    pub peaks: Option<PeakSet>,
    pub measurements: Vec<PeakMeasurement<T>>,
}

pub fn compute_thresholds<T: Real>(
    img: &GrayImage,
    cfg: &ThresholdConfig,
) -> Result<ThresholdSet, ThresholdError> {
    Ok(run_thresholds::<T>(img, cfg)?.set)
}

pub fn run_thresholds<T: Real>(
    img: &GrayImage,
    cfg: &ThresholdConfig,
) -> Result<ThresholdRun<T>, ThresholdError> {
    let hist = compute_histogram(img);
    run_on_histogram(&hist, cfg)
}

pub fn run_on_histogram<T: Real>(
    hist: &Histogram,
    cfg: &ThresholdConfig,
) -> Result<ThresholdRun<T>, ThresholdError> {
    if hist.is_empty() {
        return Err(HistogramError::NoPeaks.into());
    }
    let q = hist.bit_depth();
    let present = hist.present();
    if present.len() == 1 && cfg.peak_override.is_none() {
        let set = ThresholdSet::new(
            cfg.mode,
            q,
            vec![Threshold {
                value: present[0],
                provenance: Provenance::Degenerate,
            }],
        )?;
        return Ok(ThresholdRun {
            set: set.with_peak_means(present)?,
            peaks: None,
            measurements: Vec::new(),
        });
    }

    let sparse = present.len() <= cfg.sparse_levels && cfg.peak_override.is_none();
    let (peaks, basis) = if sparse {
        (
            sparse_peak(hist, &present, cfg.peaks.width_divisor)?,
            IntensityBasis::present(hist)?,
        )
    } else {
        let peaks = match &cfg.peak_override {
            Some(p) => p.clone(),
            None => detect_peaks(hist, &cfg.peaks)?,
        };
        (peaks, IntensityBasis::full_range(q)?)
    };

    let support = build_support_state::<T>(&basis, hist)?;
    let simulator = Simulator::with_cap(cfg.qubit_cap);
    let measurements = peaks
        .peaks()
        .iter()
        .enumerate()
        .map(|(k, peak)| {
            let effect = GaussianEffect::new(
                T::from_u32(peak.mean).unwrap(),
                T::lit(peak.width),
                basis.clone(),
            )?;
            let weighted = apply_effect(&effect, &support)?;
            measure_peak(
                k,
                &weighted.padded_probabilities(),
                &basis,
                cfg.mode,
                &simulator,
            )
        })
        .collect::<Result<Vec<_>, ThresholdError>>()?;

    let thresholds = if measurements.len() == 1 {
        vec![Threshold {
            value: unimodal_threshold(&measurements[0])?,
            provenance: Provenance::UnimodalArgmax,
        }]
    } else {
        let p = peaks.peaks();
        (0..p.len() - 1)
            .map(|k| {
                let (lo, hi) = (p[k].mean, p[k + 1].mean);
                match crossing_threshold(&measurements[k], &measurements[k + 1], lo, hi) {
                    Ok(value) => Ok(Threshold {
                        value,
                        provenance: Provenance::PeakPair(k),
                    }),
                    Err(ThresholdError::EmptyOverlap(..)) => Ok(Threshold {
                        value: p[k].right_valley.clamp(lo, hi - 1),
                        provenance: Provenance::ValleyFallback(k),
                    }),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>, ThresholdError>>()?
    };
    let set = ThresholdSet::new(cfg.mode, q, thresholds)?.with_peak_means(peaks.means())?;
    Ok(ThresholdRun {
        set,
        peaks: Some(peaks),
        measurements,
    })
}

/// One peak at the mode, spanning the present intensities.
fn sparse_peak(hist: &Histogram, present: &[u32], divisor: f64) -> Result<PeakSet, ThresholdError> {
    let (lo, hi) = (present[0], present[present.len() - 1]);
    let mean = hist.mode().ok_or(HistogramError::NoPeaks)?;
    let width = (f64::from(hi - lo) / divisor).max(1.0);
    Ok(PeakSet::new(vec![crate::histogram::Peak {
        mean,
        width,
        left_valley: lo,
        right_valley: hi,
    }])?)
}

/// Load `probabilities` (length `2^k`) into a `k`-qubit register, simulate,
/// and read it out in `mode`. Peak `k` samples with seed `seed + k`.
fn measure_peak<T: Real>(
    peak: usize,
    probabilities: &[T],
    basis: &IntensityBasis,
    mode: Mode,
    simulator: &Simulator,
) -> Result<PeakMeasurement<T>, ThresholdError> {
    let tree = gen_angles(probabilities)?;
    let circuit = build_load_circuit(&tree);
    let state = simulator.simulate(&circuit, None)?;
    let width = circuit.width();
    let len = basis.len();
    let (probabilities, shots) = match mode {
        Mode::Sampled { shots, seed } if width > 0 => {
            let measured: Vec<usize> = (0..width).collect();
            let counts = sample(&state, &measured, shots, seed.wrapping_add(peak as u64))?;
            let mut freq = vec![T::zero(); len];
            for (key, &n) in &counts.counts {
                let index = usize::from_str_radix(key, 2).expect("sampler emits binary keys");
                if index < len {
                    freq[index] = T::from_u64(n).unwrap() / T::from_u64(shots).unwrap();
                }
            }
            (freq, Some(shots))
        }
        _ => {
            let mut p = state.probabilities();
            p.truncate(len);
            (p, None)
        }
    };
    Ok(PeakMeasurement {
        peak,
        basis: basis.clone(),
        probabilities,
        shots,
    })
}

/// Representative intensity of each threshold segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRule {
    /// Rounded mean of the segment's pixels.
    #[default]
    SegmentMean,
    /// The peak mean inside the segment, else the segment mean.
    PeakValue,
    /// Evenly spaced levels from 0 to the maximum intensity; with one
    /// threshold, plain black and white.
    BinaryExtremes,
}

impl FromStr for LevelRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "segment-mean" => Ok(LevelRule::SegmentMean),
            "peak-value" => Ok(LevelRule::PeakValue),
            "binary-extremes" => Ok(LevelRule::BinaryExtremes),
            other => Err(format!("unknown level rule {other:?}")),
        }
    }
}

/// Segment index of `v`: segment `j` holds `T_j < v ≤ T_{j+1}`.
fn segment_of(thresholds: &[u32], v: u32) -> usize {
    thresholds.partition_point(|&t| t < v)
}

/// Map every pixel to its segment's representative.
pub fn quantize(img: &GrayImage, tset: &ThresholdSet, rule: LevelRule) -> GrayImage {
    let thresholds = tset.values();
    let segments = thresholds.len() + 1;
    let mut sums = vec![0u64; segments];
    let mut counts = vec![0u64; segments];
    for &p in img.pixels() {
        let s = segment_of(&thresholds, u32::from(p));
        sums[s] += u64::from(p);
        counts[s] += 1;
    }
    let mean = |s: usize| {
        if counts[s] == 0 {
            0
        } else {
            ((sums[s] as f64) / (counts[s] as f64)).round() as u32
        }
    };
    let max = img.max_value();
    let levels: Vec<u32> = (0..segments)
        .map(|s| match rule {
            _ if thresholds.is_empty() => mean(s),
            LevelRule::SegmentMean => mean(s),
            LevelRule::PeakValue => tset
                .peak_means()
                .iter()
                .copied()
                .find(|&m| segment_of(&thresholds, m) == s)
                .unwrap_or_else(|| mean(s)),
            LevelRule::BinaryExtremes => {
                ((s as f64) * f64::from(max) / ((segments - 1) as f64)).round() as u32
            }
        })
        .collect();
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| levels[segment_of(&thresholds, u32::from(p))] as u8)
        .collect();
    img.with_pixels(img.bit_depth(), pixels)
        .expect("levels within range")
}

/// The threshold used to binarize: the one nearest the median intensity
/// (lower on ties).
pub fn select_binary_threshold(tset: &ThresholdSet, hist: &Histogram) -> Option<u32> {
    let median = i64::from(hist.median()?);
    tset.values()
        .into_iter()
        .min_by_key(|&t| ((i64::from(t) - median).abs(), t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::Peak;

    fn meas(peak: usize, basis: &IntensityBasis, p: Vec<f64>) -> PeakMeasurement<f64> {
        PeakMeasurement {
            peak,
            basis: basis.clone(),
            probabilities: p,
            shots: None,
        }
    }

    pub(crate) fn case_one() -> GrayImage {
        #[rustfmt::skip]
        let px = vec![
            63, 100, 100, 141,
            100, 155, 100, 63,
            141, 100, 100, 155,
            63, 100, 141, 100,
        ];
        GrayImage::new(4, 4, 8, px).unwrap()
    }

    #[test]
    fn unimodal_argmax_and_ties() {
        let basis = IntensityBasis::new(vec![63, 100, 141, 155], 8).unwrap();
        assert_eq!(
            unimodal_threshold(&meas(0, &basis, vec![0.2, 0.6, 0.15, 0.05])).unwrap(),
            100
        );
        assert_eq!(
            unimodal_threshold(&meas(0, &basis, vec![0.0, 0.0, 1.0, 0.0])).unwrap(),
            141
        );
        assert_eq!(
            unimodal_threshold(&meas(0, &basis, vec![0.1, 0.4, 0.4, 0.1])).unwrap(),
            100
        );
        assert_eq!(
            unimodal_threshold(&meas(0, &basis, vec![0.0; 4])),
            Err(ThresholdError::EmptyMeasurement)
        );
    }

    #[test]
    fn case_one_pipeline() {
        let set = compute_thresholds::<f64>(&case_one(), &ThresholdConfig::default()).unwrap();
        assert_eq!(set.values(), vec![100]);
        assert_eq!(set.thresholds()[0].provenance, Provenance::UnimodalArgmax);
        let cfg = ThresholdConfig {
            mode: Mode::Sampled {
                shots: 1000,
                seed: 3,
            },
            ..Default::default()
        };
        assert_eq!(
            compute_thresholds::<f64>(&case_one(), &cfg)
                .unwrap()
                .values(),
            vec![100]
        );
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = GrayImage::filled(4, 4, 8, 77).unwrap();
        let set = compute_thresholds::<f64>(&img, &ThresholdConfig::default()).unwrap();
        assert_eq!(set.values(), vec![77]);
        assert_eq!(set.thresholds()[0].provenance, Provenance::Degenerate);
    }

    #[test]
    fn symmetric_pair_crosses_at_midpoint() {
        let hist = Histogram::from_counts(vec![1; 256]).unwrap();
        let peaks = PeakSet::new(vec![
            Peak {
                mean: 50,
                width: 20.0,
                left_valley: 0,
                right_valley: 100,
            },
            Peak {
                mean: 150,
                width: 20.0,
                left_valley: 100,
                right_valley: 255,
            },
        ])
        .unwrap();
        let cfg = ThresholdConfig {
            peak_override: Some(peaks),
            ..Default::default()
        };
        let run = run_on_histogram::<f64>(&hist, &cfg).unwrap();
        assert_eq!(run.set.values(), vec![100]);
        assert_eq!(run.set.thresholds()[0].provenance, Provenance::PeakPair(0));
        assert_eq!(run.measurements.len(), 2);
    }

    #[test]
    fn disjoint_support_falls_back_to_valley() {
        let basis = IntensityBasis::full_range(2).unwrap();
        let a = meas(0, &basis, vec![1.0, 0.0, 0.0, 0.0]);
        let b = meas(1, &basis, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            crossing_threshold(&a, &b, 0, 3),
            Err(ThresholdError::EmptyOverlap(0, 1))
        );
    }

    #[test]
    fn quantize_rules() {
        let img = GrayImage::new(2, 2, 8, vec![10, 20, 200, 210]).unwrap();
        let set = ThresholdSet::new(
            Mode::Classical,
            8,
            vec![Threshold {
                value: 100,
                provenance: Provenance::Otsu,
            }],
        )
        .unwrap();
        assert_eq!(
            quantize(&img, &set, LevelRule::SegmentMean).pixels(),
            &[15, 15, 205, 205]
        );
        assert_eq!(
            quantize(&img, &set, LevelRule::BinaryExtremes).pixels(),
            &[0, 0, 255, 255]
        );

        let set = set.with_peak_means(vec![12, 207]).unwrap();
        assert_eq!(
            quantize(&img, &set, LevelRule::PeakValue).pixels(),
            &[12, 12, 207, 207]
        );

        let case = case_one();
        let set = compute_thresholds::<f64>(&case, &ThresholdConfig::default()).unwrap();
        let out = quantize(&case, &set, LevelRule::BinaryExtremes);
        for (&a, &b) in case.pixels().iter().zip(out.pixels()) {
            assert_eq!(b, if a > 100 { 255 } else { 0 });
        }
    }

    #[test]
    fn quantize_without_thresholds_is_constant_mean() {
        let img = GrayImage::new(2, 2, 8, vec![10, 20, 30, 40]).unwrap();
        let set = ThresholdSet::new(Mode::Classical, 8, vec![]).unwrap();
        for rule in [
            LevelRule::SegmentMean,
            LevelRule::PeakValue,
            LevelRule::BinaryExtremes,
        ] {
            assert_eq!(quantize(&img, &set, rule).pixels(), &[25; 4]);
        }
    }

    #[test]
    fn set_validation_and_json() {
        let t = |value| Threshold {
            value,
            provenance: Provenance::PeakPair(0),
        };
        assert!(ThresholdSet::new(Mode::Exact, 8, vec![t(5), t(5)]).is_err());
        assert!(ThresholdSet::new(Mode::Exact, 2, vec![t(4)]).is_err());
        let set = ThresholdSet::new(
            Mode::Sampled {
                shots: 100,
                seed: 1,
            },
            8,
            vec![
                t(40),
                Threshold {
                    value: 90,
                    provenance: Provenance::ValleyFallback(1),
                },
            ],
        )
        .unwrap();
        let json = set.to_json();
        assert!(json.contains("\"peaks 0-1\""));
        assert!(json.contains("\"valley 1-2\""));
        assert!(!json.contains("peak_means"));
        assert_eq!(ThresholdSet::from_json(&json).unwrap(), set);
        assert!(ThresholdSet::from_json(&json.replace("90", "30")).is_err());
        assert!("peaks 1-3".parse::<Provenance>().is_err());
    }

    #[test]
    fn binary_threshold_nearest_median() {
        let hist = Histogram::from_counts({
            let mut c = vec![0u64; 256];
            c[100] = 3;
            c[200] = 2;
            c
        })
        .unwrap();
        let t = |value| Threshold {
            value,
            provenance: Provenance::PeakPair(0),
        };
        let set = ThresholdSet::new(Mode::Exact, 8, vec![t(50), t(120), t(180)]).unwrap();
        assert_eq!(select_binary_threshold(&set, &hist), Some(120));
    }
}
