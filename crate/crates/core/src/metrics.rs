//! PSNR and windowed SSIM between two grayscale images.

use serde::Serialize;
use thiserror::Error;

use crate::image::GrayImage;
use crate::scalar::Real;

/// Reported PSNR for identical images.
pub const PSNR_CAP_DB: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("images differ: {0}")]
    DimensionMismatch(String),
    #[error("SSIM window {window} does not fit a {width}x{height} image")]
    WindowTooLarge {
        window: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid SSIM configuration: {0}")]
    InvalidConfig(String),
}

fn check_pair(a: &GrayImage, b: &GrayImage) -> Result<(), MetricsError> {
    if !a.same_shape(b) {
        return Err(MetricsError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.bit_depth() != b.bit_depth() {
        return Err(MetricsError::DimensionMismatch(format!(
            "bit depth {} vs {}",
            a.bit_depth(),
            b.bit_depth()
        )));
    }
    Ok(())
}

pub fn mse<T: Real>(a: &GrayImage, b: &GrayImage) -> Result<T, MetricsError> {
    check_pair(a, b)?;
    let sum: T = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = T::from_i32(i32::from(x) - i32::from(y)).expect("small int");
            d * d
        })
        .sum();
    Ok(sum / T::from_usize_lossy(a.len()))
}

/// `10·log10(peak² / MSE)` with `peak = 2^q - 1`; identical images give the
/// 100 dB cap.
pub fn psnr<T: Real>(a: &GrayImage, b: &GrayImage) -> Result<T, MetricsError> {
    let err = mse::<T>(a, b)?;
    Ok(psnr_from_mse(err, a.max_value()))
}

fn psnr_from_mse<T: Real>(mse: T, peak: u32) -> T {
    if mse == T::zero() {
        return T::lit(PSNR_CAP_DB);
    }
    let peak = T::from_u32(peak).expect("u32 fits");
    T::lit(10.0) * (peak * peak / mse).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SsimConfig {
    pub window: usize,
    pub stride: usize,
    pub k1: f64,
    pub k2: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            window: 8,
            stride: 1,
            k1: 0.01,
            k2: 0.03,
        }
    }
}

/// Mean SSIM over all `window × window` uniform windows placed every
/// `stride` pixels, with `c1 = (k1·peak)²` and `c2 = (k2·peak)²`.
pub fn ssim<T: Real>(a: &GrayImage, b: &GrayImage, cfg: &SsimConfig) -> Result<T, MetricsError> {
    check_pair(a, b)?;
    if cfg.window == 0 || cfg.stride == 0 {
        return Err(MetricsError::InvalidConfig(
            "window and stride must be positive".into(),
        ));
    }
    if cfg.window > a.width() || cfg.window > a.height() {
        return Err(MetricsError::WindowTooLarge {
            window: cfg.window,
            width: a.width(),
            height: a.height(),
        });
    }
    let (c1, c2) = constants::<T>(cfg, a.max_value());
    let two = T::one() + T::one();
    let n = T::from_usize_lossy(cfg.window * cfg.window);
    let w = a.width();
    let to_t = |v: u8| T::from_u8(v).expect("u8 fits");

    let mut total = T::zero();
    let mut windows = 0usize;
    for top in (0..=a.height() - cfg.window).step_by(cfg.stride) {
        for left in (0..=w - cfg.window).step_by(cfg.stride) {
            let (mut sa, mut sb) = (T::zero(), T::zero());
            for r in top..top + cfg.window {
                for c in left..left + cfg.window {
                    sa += to_t(a.pixels()[r * w + c]);
                    sb += to_t(b.pixels()[r * w + c]);
                }
            }
            let (ma, mb) = (sa / n, sb / n);
            let (mut va, mut vb, mut cov) = (T::zero(), T::zero(), T::zero());
            for r in top..top + cfg.window {
                for c in left..left + cfg.window {
                    let da = to_t(a.pixels()[r * w + c]) - ma;
                    let db = to_t(b.pixels()[r * w + c]) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            }
            let (va, vb, cov) = (va / n, vb / n, cov / n);
            let num = (two * ma * mb + c1) * (two * cov + c2);
            let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
            total += num / den;
            windows += 1;
        }
    }
    Ok(total / T::from_usize_lossy(windows))
}

fn constants<T: Real>(cfg: &SsimConfig, peak: u32) -> (T, T) {
    let peak = f64::from(peak);
    (
        T::lit((cfg.k1 * peak).powi(2)),
        T::lit((cfg.k2 * peak).powi(2)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport<T> {
    pub psnr_db: T,
    pub ssim: T,
    pub mse: T,
    pub window: usize,
    pub c1: T,
    pub c2: T,
}

/// PSNR, SSIM and MSE of `processed` against `original`.
pub fn report<T: Real>(
    original: &GrayImage,
    processed: &GrayImage,
    cfg: &SsimConfig,
) -> Result<MetricsReport<T>, MetricsError> {
    let err = mse::<T>(original, processed)?;
    let (c1, c2) = constants::<T>(cfg, original.max_value());
    Ok(MetricsReport {
        psnr_db: psnr_from_mse(err, original.max_value()),
        ssim: ssim(original, processed, cfg)?,
        mse: err,
        window: cfg.window,
        c1,
        c2,
    })
}
