//! Scalar abstraction shared by the simulator, the effect operators and the
//! quality metrics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that the core checks
/// (state normalization, probability sums) are type dependent and come from
/// [`Real::tolerance`].
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for normalization checks.
    fn tolerance() -> Self;

    /// Lossy conversion from `f64`, used for literal constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f32::from_usize_lossy(256), 256.0);
    }
}
