//! Scalar traits the matrix code is generic over.
//!
//! Everything that only adds and multiplies (monomials, the signed partition
//! sum, leg identifying multiplication) needs a commutative ring, expressed
//! as [`Scalar`]. Anything that divides (LU, back-substitution, classical
//! determinants by elimination) needs a [`Field`].

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Num;

/// Commutative ring element usable as a matrix entry.
pub trait Scalar: Num + Clone + Debug + Neg<Output = Self> + Send + Sync {}

impl<T> Scalar for T where T: Num + Clone + Debug + Neg<Output = T> + Send + Sync {}

/// Marker for scalars whose `/` is exact field division.
///
/// Integer types implement [`Num`] too, but their division truncates, so they
/// are deliberately not fields.
pub trait Field: Scalar {}

impl<I> Field for Ratio<I> where I: Integer + Clone + Debug + Neg<Output = I> + Send + Sync {}
impl Field for f64 {}
impl Field for f32 {}

/// Scalars that can be read from and written to the string form used by the
/// JSON formats (`"5"`, `"-3/7"`).
pub trait TextScalar: Scalar + Display + FromStr {}

impl<T> TextScalar for T where T: Scalar + Display + FromStr {}
