//! S2-determinants of `d x d(2d-1)` matrices over exact rationals.
//!
//! The core routines are generic over the entry type; the aliases below fix
//! it to arbitrary-precision rationals.

pub mod combinat;
pub mod dets2;
pub mod error;
pub mod leg_algebra;
pub mod matrix;
pub mod sample;
pub mod scalar;
pub mod signmap;
mod union_find;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational entries.
pub type Rational = num_rational::BigRational;
/// `d x d(2d-1)` matrix over [`Rational`].
pub type Matrix = matrix::S2Matrix<Rational>;
/// Square matrix over [`Rational`].
pub type Square = leg_algebra::SquareMatrix<Rational>;
