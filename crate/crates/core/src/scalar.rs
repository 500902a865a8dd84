//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All information measures are written against [`Real`], so the same code
//! runs in `f32` and `f64`. Tolerances quoted for double precision are lifted
//! to a few ulps when the scalar type cannot resolve them (see [`tol`]).

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::float::TotalOrder;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + TotalOrder
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Natural log of the gamma function.
    fn log_gamma(self) -> Self;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest tolerance that is meaningful for this type.
    #[inline]
    fn noise_floor() -> Self {
        Self::epsilon() * Self::lit(16.0)
    }
}

impl Real for f64 {
    #[inline]
    fn log_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Real for f32 {
    #[inline]
    fn log_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

/// A double-precision tolerance, raised to the type's noise floor if needed.
#[inline]
pub fn tol<T: Real>(value: f64) -> T {
    T::lit(value).max(T::noise_floor())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_matches_factorials() {
        // ln(5!) = ln 120
        assert!((6.0f64.log_gamma() - 120f64.ln()).abs() < 1e-13);
        assert!((6.0f32.log_gamma() - 120f32.ln()).abs() < 1e-5);
        assert_eq!(1.0f64.log_gamma(), 0.0);
    }

    #[test]
    fn tolerance_respects_precision() {
        assert_eq!(tol::<f64>(1e-12), 1e-12);
        assert!(tol::<f32>(1e-12) > 1e-7);
    }
}
