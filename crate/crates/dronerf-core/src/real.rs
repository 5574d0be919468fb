use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar used throughout the pipeline.
///
/// `f32` is the production dtype; `f64` is the verification dtype used by
/// the oracle suites (brute-force DFT, finite-difference gradients,
/// normalisation post-checks at 1e-9).
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum<Self>
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const DTYPE: &'static str;

    /// Lossy conversion from `f64`; panics only for exotic types that
    /// cannot represent ordinary finite values.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 convertible to Real")
    }

    /// Widening conversion to `f64`.
    fn to64(self) -> f64 {
        self.to_f64().expect("Real convertible to f64")
    }
}

impl Real for f32 {
    const DTYPE: &'static str = "f32";
}

impl Real for f64 {
    const DTYPE: &'static str = "f64";
}
