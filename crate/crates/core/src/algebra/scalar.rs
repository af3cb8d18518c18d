use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact Gaussian rationals.
pub type GaussRational = Complex<BigRational>;

/// Coefficient field of the monomial algebra.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conjugate(&self) -> Self;

    /// Zero for exact types; below `1e-12` in modulus for floats.
    fn is_negligible(&self) -> bool;

    fn to_complex(&self) -> Complex64;
}

pub const FLOAT_EQ_TOL: f64 = 1e-12;

impl Scalar for Complex64 {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn is_negligible(&self) -> bool {
        self.norm() < FLOAT_EQ_TOL
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

impl Scalar for GaussRational {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// `a/b + 0i` as an exact coefficient.
pub fn gauss_ratio(a: i64, b: i64) -> GaussRational {
    Complex::new(
        BigRational::new(BigInt::from(a), BigInt::from(b)),
        BigRational::zero(),
    )
}

/// `1` as an exact coefficient.
pub fn gauss_one() -> GaussRational {
    GaussRational::one()
}
