//! The scalar abstraction every model is generic over.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// A real floating-point scalar (`f32` or `f64`).
///
/// Special functions that have no `num-traits` equivalent are routed through
/// `f64` and converted back.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    #[inline]
    fn from_u64_lossy(n: u64) -> Self {
        Self::from_u64(n).expect("integer representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Complementary error function.
    fn erfc(self) -> Self {
        Self::c(libm::erfc(self.f64()))
    }

    /// Inverse of [`Real::erfc`] on `(0, 2)`.
    fn erfc_inv(self) -> Self {
        Self::c(erfc_inv_f64(self.f64()))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// statrs gives a starting point good to ~1e-10; Newton steps against the
/// 1-ulp `libm::erfc` bring it to full precision.
fn erfc_inv_f64(y: f64) -> f64 {
    let mut x = statrs::function::erf::erfc_inv(y);
    if !x.is_finite() {
        return x;
    }
    let scale = 2.0 / std::f64::consts::PI.sqrt();
    for _ in 0..3 {
        let slope = scale * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        let step = (libm::erfc(x) - y) / slope;
        x += step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}
