//! Intensity histograms and the peak/valley extraction that seeds the
//! per-peak effect operators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::GrayImage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistogramError {
    #[error("smoothing window must be odd and positive, got {0}")]
    EvenWindow(usize),
    #[error("histogram has no peaks (all bins are zero)")]
    NoPeaks,
    #[error("invalid peak set: {0}")]
    InvalidPeakSet(String),
    #[error("histogram counts do not match: {0}")]
    Invalid(String),
}

/// Per-intensity pixel counts of an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    /// Histogram from raw counts; `counts.len()` must be a power of two ≥ 2.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self, HistogramError> {
        if counts.len() < 2 || !counts.len().is_power_of_two() || counts.len() > 256 {
            return Err(HistogramError::Invalid(format!(
                "{} bins is not 2^q for q in 1..=8",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn bit_depth(&self) -> u8 {
        self.counts.len().trailing_zeros() as u8
    }

    /// Intensities with at least one pixel, ascending.
    pub fn present(&self) -> Vec<u32> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, _)| v as u32)
            .collect()
    }

    /// Most frequent intensity; ties resolve to the lowest.
    pub fn mode(&self) -> Option<u32> {
        let mut best: Option<(u32, u64)> = None;
        for (v, &c) in self.counts.iter().enumerate() {
            if c > 0 && best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v as u32, c));
            }
        }
        best.map(|(v, _)| v)
    }

    /// Lowest intensity whose cumulative count reaches half the pixels.
    pub fn median(&self) -> Option<u32> {
        if self.total == 0 {
            return None;
        }
        let half = self.total.div_ceil(2);
        let mut acc = 0;
        for (v, &c) in self.counts.iter().enumerate() {
            acc += c;
            if acc >= half {
                return Some(v as u32);
            }
        }
        None
    }
}

pub fn compute_histogram(img: &GrayImage) -> Histogram {
    let mut counts = vec![0u64; 1usize << img.bit_depth()];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    Histogram {
        counts,
        total: img.len() as u64,
    }
}

/// Moving average with edge replication. `window == 1` is the identity.
pub fn smooth(hist: &Histogram, window: usize) -> Result<Vec<f64>, HistogramError> {
    let values: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    smooth_values(&values, window)
}

pub(crate) fn smooth_values(values: &[f64], window: usize) -> Result<Vec<f64>, HistogramError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(HistogramError::EvenWindow(window));
    }
    if window == 1 || values.is_empty() {
        return Ok(values.to_vec());
    }
    let half = (window / 2) as isize;
    let last = values.len() as isize - 1;
    Ok((0..values.len() as isize)
        .map(|i| {
            let sum: f64 = (i - half..=i + half)
                .map(|j| values[j.clamp(0, last) as usize])
                .sum();
            sum / window as f64
        })
        .collect())
}

/// Tuning for [`detect_peaks`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PeakConfig {
    pub smooth_window: usize,
    /// Minimum prominence as a fraction of the tallest smoothed bin.
    pub prominence_fraction: f64,
    /// Minimum distance between retained peaks, in intensity levels.
    pub min_separation: u32,
    /// Peak width is the inter-valley distance divided by this.
    pub width_divisor: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self {
            smooth_window: 9,
            prominence_fraction: 0.05,
            min_separation: 10,
            width_divisor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub mean: u32,
    pub width: f64,
    pub left_valley: u32,
    pub right_valley: u32,
}

/// Peaks sorted by mean, with adjacent peaks sharing a valley.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeakSetDoc", into = "PeakSetDoc")]
pub struct PeakSet {
    peaks: Vec<Peak>,
}

#[derive(Serialize, Deserialize)]
struct PeakSetDoc {
    peaks: Vec<Peak>,
}

impl TryFrom<PeakSetDoc> for PeakSet {
    type Error = HistogramError;

    fn try_from(doc: PeakSetDoc) -> Result<Self, Self::Error> {
        PeakSet::new(doc.peaks)
    }
}

impl From<PeakSet> for PeakSetDoc {
    fn from(set: PeakSet) -> Self {
        PeakSetDoc { peaks: set.peaks }
    }
}

impl PeakSet {
    pub fn new(peaks: Vec<Peak>) -> Result<Self, HistogramError> {
        if peaks.is_empty() {
            return Err(HistogramError::InvalidPeakSet("no peaks".into()));
        }
        for (k, p) in peaks.iter().enumerate() {
            if !(p.width > 0.0 && p.width.is_finite()) {
                return Err(HistogramError::InvalidPeakSet(format!(
                    "peak {k} has non-positive width {}",
                    p.width
                )));
            }
            if !(p.left_valley <= p.mean && p.mean <= p.right_valley) {
                return Err(HistogramError::InvalidPeakSet(format!(
                    "peak {k} mean {} outside its valleys [{}, {}]",
                    p.mean, p.left_valley, p.right_valley
                )));
            }
        }
        for (k, pair) in peaks.windows(2).enumerate() {
            if pair[0].mean >= pair[1].mean {
                return Err(HistogramError::InvalidPeakSet(format!(
                    "peaks {k} and {} are not strictly ascending",
                    k + 1
                )));
            }
            if pair[0].right_valley != pair[1].left_valley {
                return Err(HistogramError::InvalidPeakSet(format!(
                    "peaks {k} and {} do not share a valley",
                    k + 1
                )));
            }
        }
        Ok(Self { peaks })
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// Number of peaks.
    pub fn p(&self) -> usize {
        self.peaks.len()
    }

    pub fn means(&self) -> Vec<u32> {
        self.peaks.iter().map(|p| p.mean).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("peak set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HistogramError> {
        serde_json::from_str(text).map_err(|e| HistogramError::InvalidPeakSet(e.to_string()))
    }
}

/// Locate histogram peaks and the valleys between them.
///
/// The histogram is smoothed, local maxima (plateaus resolve to their
/// midpoint) are filtered by topographic prominence relative to the tallest
/// smoothed bin, then thinned greedily by height to respect
/// `min_separation`. A maximum on the first or last bin is kept only when
/// there is no interior one. The valley between two retained peaks is the lowest
/// smoothed bin between them; the histogram ends act as the outer valleys.
pub fn detect_peaks(hist: &Histogram, cfg: &PeakConfig) -> Result<PeakSet, HistogramError> {
    if hist.total == 0 {
        return Err(HistogramError::NoPeaks);
    }
    let smoothed = smooth(hist, cfg.smooth_window)?;
    let top = smoothed.iter().cloned().fold(0.0, f64::max);
    let min_prominence = cfg.prominence_fraction * top;

    let last = smoothed.len() - 1;
    let (interior, ends): (Vec<usize>, Vec<usize>) = local_maxima(&smoothed)
        .into_iter()
        .filter(|&i| prominence(&smoothed, i) >= min_prominence)
        .partition(|&i| i != 0 && i != last);
    // maxima on the end bins are usually clipping; only used when nothing
    // else qualifies
    let mut candidates = if interior.is_empty() { ends } else { interior };
    // tallest first; index breaks ties
    candidates.sort_by(|&a, &b| smoothed[b].total_cmp(&smoothed[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept
            .iter()
            .all(|&k| (c as i64 - k as i64).unsigned_abs() >= u64::from(cfg.min_separation))
        {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    if kept.is_empty() {
        return Err(HistogramError::NoPeaks);
    }

    let mut valleys = Vec::with_capacity(kept.len() + 1);
    valleys.push(0usize);
    for pair in kept.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut best = a;
        for i in a..=b {
            if smoothed[i] < smoothed[best] {
                best = i;
            }
        }
        valleys.push(best);
    }
    valleys.push(smoothed.len() - 1);

    let peaks = kept
        .iter()
        .enumerate()
        .map(|(k, &mean)| {
            let (lv, rv) = (valleys[k], valleys[k + 1]);
            let span = (rv - lv).max(1) as f64;
            Peak {
                mean: mean as u32,
                width: span / cfg.width_divisor,
                left_valley: lv as u32,
                right_valley: rv as u32,
            }
        })
        .collect();
    PeakSet::new(peaks)
}

/// Indices of strict local maxima; a flat run counts once, at its midpoint.
fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let rises = i == 0 || values[i - 1] < values[i];
        let falls = j == n - 1 || values[j + 1] < values[i];
        if values[i] > 0.0 && rises && falls && !(i == 0 && j == n - 1) {
            out.push((i + j) / 2);
        }
        i = j + 1;
    }
    if out.is_empty() && n > 0 && values[0] > 0.0 && values.iter().all(|&v| v == values[0]) {
        out.push((n - 1) / 2);
    }
    out
}

/// Height above the higher of the two lowest points reachable on either side
/// before climbing above the peak. Beyond the histogram ends counts are zero.
fn prominence(values: &[f64], peak: usize) -> f64 {
    let h = values[peak];
    let left_min = side_minimum(h, values[..peak].iter().rev());
    let right_min = side_minimum(h, values[peak + 1..].iter());
    h - left_min.max(right_min)
}

fn side_minimum<'a>(height: f64, side: impl Iterator<Item = &'a f64>) -> f64 {
    let mut low = height;
    for &v in side {
        if v > height {
            return low;
        }
        low = low.min(v);
    }
    0.0
}
