//! Classical baselines: Otsu's threshold and multi-level Otsu.

use thiserror::Error;

use crate::histogram::Histogram;
use crate::thresholding::{Mode, Provenance, Threshold, ThresholdSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("histogram has fewer than two occupied bins")]
    DegenerateHistogram,
    #[error("{classes} classes need at least {classes} occupied bins, found {found}")]
    TooFewLevels { classes: usize, found: usize },
    #[error("at least two classes are required, got {0}")]
    InvalidClasses(usize),
}

/// Between-class variance of `{v ≤ t}` vs `{v > t}`, up to the constant
/// factor `1/N⁴`: `(S0·n1 − S1·n0)² / (n0·n1)`.
pub fn between_class_variance(hist: &Histogram, t: usize) -> f64 {
    let (mut n0, mut s0) = (0i128, 0i128);
    for (v, &c) in hist.counts()[..=t].iter().enumerate() {
        n0 += i128::from(c);
        s0 += i128::from(c) * v as i128;
    }
    let (mut n1, mut s1) = (0i128, 0i128);
    for (v, &c) in hist.counts().iter().enumerate().skip(t + 1) {
        n1 += i128::from(c);
        s1 += i128::from(c) * v as i128;
    }
    scaled_variance(n0, s0, n1, s1)
}

fn scaled_variance(n0: i128, s0: i128, n1: i128, s1: i128) -> f64 {
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let d = (s0 * n1 - s1 * n0) as f64;
    d * d / (n0 as f64 * n1 as f64)
}

/// Otsu's threshold; ties go to the lowest `t`.
pub fn otsu(hist: &Histogram) -> Result<u32, BaselineError> {
    if hist.present().len() < 2 {
        return Err(BaselineError::DegenerateHistogram);
    }
    let total_n: i128 = hist.counts().iter().map(|&c| i128::from(c)).sum();
    let total_s: i128 = hist
        .counts()
        .iter()
        .enumerate()
        .map(|(v, &c)| i128::from(c) * v as i128)
        .sum();
    let (mut n0, mut s0) = (0i128, 0i128);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (t, &c) in hist.counts()[..hist.len() - 1].iter().enumerate() {
        n0 += i128::from(c);
        s0 += i128::from(c) * t as i128;
        let var = scaled_variance(n0, s0, total_n - n0, total_s - s0);
        if var > best.1 {
            best = (t, var);
        }
    }
    Ok(best.0 as u32)
}

/// Prefix sums for `O(1)` class statistics.
struct Moments {
    n: Vec<f64>,
    s: Vec<f64>,
}

impl Moments {
    fn new(hist: &Histogram) -> Self {
        let mut n = vec![0.0];
        let mut s = vec![0.0];
        for (v, &c) in hist.counts().iter().enumerate() {
            n.push(n.last().unwrap() + c as f64);
            s.push(s.last().unwrap() + c as f64 * v as f64);
        }
        Self { n, s }
    }

    /// `S²/n` of bins `lo..=hi`, or `None` when the class is empty.
    fn class(&self, lo: usize, hi: usize) -> Option<f64> {
        let n = self.n[hi + 1] - self.n[lo];
        if n == 0.0 {
            return None;
        }
        let s = self.s[hi + 1] - self.s[lo];
        Some(s * s / n)
    }
}

/// `classes − 1` thresholds maximizing `Σ S_c² / n_c` over non-empty
/// classes, which is the total between-class variance up to constants.
/// Two classes reduce to [`otsu`]; three are searched exhaustively and more
/// by dynamic programming. Ties go to the lexicographically smallest tuple.
pub fn multi_otsu(hist: &Histogram, classes: usize) -> Result<ThresholdSet, BaselineError> {
    check_classes(hist, classes)?;
    let cuts = match classes {
        2 => vec![otsu(hist)?],
        3 => multi_otsu_exhaustive(hist, 3)?,
        _ => multi_otsu_dp(hist, classes)?,
    };
    let thresholds = cuts
        .into_iter()
        .map(|value| Threshold {
            value,
            provenance: if classes == 2 {
                Provenance::Otsu
            } else {
                Provenance::MultiOtsu
            },
        })
        .collect();
    Ok(
        ThresholdSet::new(Mode::Classical, hist.bit_depth(), thresholds)
            .expect("cuts ascend within range"),
    )
}

fn check_classes(hist: &Histogram, classes: usize) -> Result<(), BaselineError> {
    if classes < 2 {
        return Err(BaselineError::InvalidClasses(classes));
    }
    let found = hist.present().len();
    if found < classes {
        return Err(BaselineError::TooFewLevels { classes, found });
    }
    Ok(())
}

/// Objective of a cut tuple, or `None` if a class is empty.
pub fn multi_otsu_objective(hist: &Histogram, cuts: &[u32]) -> Option<f64> {
    let m = Moments::new(hist);
    let mut lo = 0;
    let mut total = 0.0;
    for &c in cuts {
        total += m.class(lo, c as usize)?;
        lo = c as usize + 1;
    }
    Some(total + m.class(lo, hist.len() - 1)?)
}

/// Brute force over every ascending cut tuple.
pub fn multi_otsu_exhaustive(hist: &Histogram, classes: usize) -> Result<Vec<u32>, BaselineError> {
    check_classes(hist, classes)?;
    let m = Moments::new(hist);
    let bins = hist.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cuts = Vec::with_capacity(classes - 1);

    fn walk(
        m: &Moments,
        bins: usize,
        left: usize,
        lo: usize,
        acc: f64,
        cuts: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if left == 0 {
            if let Some(last) = m.class(lo, bins - 1) {
                let total = acc + last;
                if best.as_ref().is_none_or(|(b, _)| total > *b) {
                    *best = Some((total, cuts.clone()));
                }
            }
            return;
        }
        for c in lo..bins - left {
            if let Some(v) = m.class(lo, c) {
                cuts.push(c);
                walk(m, bins, left - 1, c + 1, acc + v, cuts, best);
                cuts.pop();
            }
        }
    }

    walk(&m, bins, classes - 1, 0, 0.0, &mut cuts, &mut best);
    let (_, cuts) = best.ok_or(BaselineError::TooFewLevels {
        classes,
        found: hist.present().len(),
    })?;
    Ok(cuts.into_iter().map(|c| c as u32).collect())
}

fn multi_otsu_dp(hist: &Histogram, classes: usize) -> Result<Vec<u32>, BaselineError> {
    let m = Moments::new(hist);
    let bins = hist.len();
    // best[c][i]: top objective for classes c.. covering bins i..
    let mut best = vec![vec![None::<f64>; bins + 1]; classes + 1];
    best[classes][bins] = Some(0.0);
    for c in (0..classes).rev() {
        for i in 0..bins {
            let mut top: Option<f64> = None;
            for j in i..bins {
                let (Some(v), Some(rest)) = (m.class(i, j), best[c + 1][j + 1]) else {
                    continue;
                };
                let total = v + rest;
                if top.is_none_or(|t| total > t) {
                    top = Some(total);
                }
            }
            best[c][i] = top;
        }
    }
    let mut cuts = Vec::with_capacity(classes - 1);
    let mut lo = 0;
    for c in 0..classes - 1 {
        let target = best[c][lo].expect("enough occupied bins");
        let j = (lo..bins)
            .find(|&j| matches!((m.class(lo, j), best[c + 1][j + 1]), (Some(v), Some(rest)) if v + rest == target))
            .expect("optimum is reachable");
        cuts.push(j as u32);
        lo = j + 1;
    }
    Ok(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spikes(at: &[(usize, u64)], bins: usize) -> Histogram {
        let mut c = vec![0u64; bins];
        for &(v, n) in at {
            c[v] = n;
        }
        Histogram::from_counts(c).unwrap()
    }

    #[test]
    fn otsu_examples() {
        assert_eq!(otsu(&spikes(&[(50, 50), (200, 50)], 256)).unwrap(), 50);
        assert_eq!(otsu(&spikes(&[(10, 7), (11, 9)], 256)).unwrap(), 10);
        assert_eq!(
            otsu(&spikes(&[(10, 7)], 256)),
            Err(BaselineError::DegenerateHistogram)
        );
    }

    #[test]
    fn three_spikes() {
        let h = spikes(&[(20, 10), (120, 10), (220, 10)], 256);
        assert_eq!(multi_otsu(&h, 3).unwrap().values(), vec![20, 120]);
        assert_eq!(multi_otsu_dp(&h, 3).unwrap(), vec![20, 120]);
        assert_eq!(multi_otsu(&h, 2).unwrap().values(), vec![otsu(&h).unwrap()]);
    }

    #[test]
    fn dp_matches_exhaustive() {
        let counts: Vec<u64> = (0..64u64).map(|v| (v * 37 % 11) + (v % 7) * 3).collect();
        let h = Histogram::from_counts(counts).unwrap();
        for k in 2..=5 {
            let a = multi_otsu_exhaustive(&h, k).unwrap();
            let b = multi_otsu_dp(&h, k).unwrap();
            let (va, vb) = (
                multi_otsu_objective(&h, &a).unwrap(),
                multi_otsu_objective(&h, &b).unwrap(),
            );
            assert!((va - vb).abs() <= 1e-9 * va, "k={k}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn class_errors() {
        let h = spikes(&[(1, 1), (2, 1)], 4);
        assert_eq!(multi_otsu(&h, 1), Err(BaselineError::InvalidClasses(1)));
        assert_eq!(
            multi_otsu(&h, 3),
            Err(BaselineError::TooFewLevels {
                classes: 3,
                found: 2
            })
        );
    }
}
