use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Coefficient ring for Magnus series and Conway polynomials.
///
/// The `Eq` bound is load-bearing: it admits the exact integer types
/// (`BigInt`, `i64`, ...) and rejects floats, so nothing approximate can leak
/// into an invariant computation.
pub trait Scalar:
    Clone
    + Eq
    + Hash
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
{
}

impl<T> Scalar for T where
    T: Clone
        + Eq
        + Hash
        + Debug
        + Display
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + AddAssign
{
}
