use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex64;
use num_traits::{NumOps, One, Zero};

/// Field element the direct solvers are generic over: `f64` for the compact
/// operators, `Complex64` for the per-mode systems of the mixed scheme.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + NumOps
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// Absolute value, used for pivot selection.
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}
