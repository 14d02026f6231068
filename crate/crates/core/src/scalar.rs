use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar the whole crate is generic over (`f32`, `f64`).
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal. Exact for `f64`, rounded for `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_subset(&x)
    }

    /// Lossy view as `f64`, used for reporting and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative width below which an eigenvalue is treated as lying on the
    /// imaginary axis: `|Re λ| <= axis_tol * (1 + |λ|)`.
    fn axis_tol() -> Self {
        Self::lit(1e-8).max(Self::default_epsilon().sqrt() * Self::lit(0.5))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
