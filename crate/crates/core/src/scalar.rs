//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the simulation and diagnostics are generic over.
///
/// Implemented for `f32` and `f64`. The associated constants carry the
/// precision-dependent defaults (kernel truncation tolerance, overflow limit).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Default certified l1 tolerance for kernel truncation.
    const DEFAULT_TRUNC_TOL: f64;
    /// Default magnitude above which a simulated value counts as overflow.
    const DEFAULT_OVERFLOW_LIMIT: f64;

    /// Lossy conversion from `f64` (rounds to nearest).
    fn of(v: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Smallest representable value strictly greater than `self`.
    fn step_up(self) -> Self;

    /// Largest representable value strictly less than `self`.
    fn step_down(self) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty, $tol:expr, $limit:expr) => {
        impl Scalar for $t {
            const DEFAULT_TRUNC_TOL: f64 = $tol;
            const DEFAULT_OVERFLOW_LIMIT: f64 = $limit;

            #[inline]
            fn of(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn step_up(self) -> Self {
                self.next_up()
            }

            #[inline]
            fn step_down(self) -> Self {
                self.next_down()
            }
        }
    };
}

impl_scalar!(f32, 1e-6, 1e37);
impl_scalar!(f64, 1e-12, 1e300);
