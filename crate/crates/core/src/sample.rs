//! Seeded random instances for property checks.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinat::{edges, EdgePair};
use crate::leg_algebra::SquareMatrix;
use crate::matrix::{ind_of, S2Matrix};
use crate::Rational;

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational: numerator in `-9..=9`, denominator in `1..=4`.
pub fn rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        BigInt::from(rng.gen_range(-9..=9)),
        BigInt::from(rng.gen_range(1..=4)),
    )
}

/// Like [`rational`] but never zero.
pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let q = rational(rng);
        if q != Rational::from_integer(0.into()) {
            return q;
        }
    }
}

pub fn vector(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| rational(rng)).collect()
}

pub fn matrix(rng: &mut impl Rng, d: usize) -> S2Matrix<Rational> {
    S2Matrix::from_fn(d, |_, _| rational(rng))
}

pub fn square(rng: &mut impl Rng, order: usize) -> SquareMatrix<Rational> {
    SquareMatrix::from_fn(order, |_, _| rational(rng))
}

/// Random S2-upper triangular matrix: column `(i,j)` is supported on rows
/// `1..=ind(i,j)`. With `nonzero_diagonal`, row `ind(i,j)` is never zero.
pub fn upper(rng: &mut impl Rng, d: usize, nonzero_diagonal: bool) -> S2Matrix<Rational> {
    triangular(rng, d, nonzero_diagonal, |row, k| row <= k)
}

/// Random S2-lower triangular matrix, rows `ind(i,j)..=d`.
pub fn lower(rng: &mut impl Rng, d: usize, nonzero_diagonal: bool) -> S2Matrix<Rational> {
    triangular(rng, d, nonzero_diagonal, |row, k| row >= k)
}

fn triangular(
    rng: &mut impl Rng,
    d: usize,
    nonzero_diagonal: bool,
    keep: impl Fn(usize, usize) -> bool,
) -> S2Matrix<Rational> {
    let inds: Vec<usize> = edges(d).map(ind_of).collect();
    S2Matrix::from_fn(d, |r, c| {
        let (row, k) = (r + 1, inds[c]);
        if row == k && nonzero_diagonal {
            nonzero_rational(rng)
        } else if keep(row, k) {
            rational(rng)
        } else {
            Rational::from_integer(0.into())
        }
    })
}

/// A uniformly chosen triangle `x < y < z` of `K_{2d}`.
pub fn triangle(rng: &mut impl Rng, d: usize) -> (usize, usize, usize) {
    let mut v: Vec<usize> = rand::seq::index::sample(rng, 2 * d, 3)
        .into_iter()
        .map(|x| x + 1)
        .collect();
    v.sort_unstable();
    (v[0], v[1], v[2])
}

/// Random matrix whose columns `(x,y)`, `(x,z)`, `(y,z)` are equal, for the
/// returned triangle.
pub fn matrix_with_equal_triangle(
    rng: &mut impl Rng,
    d: usize,
) -> (S2Matrix<Rational>, (usize, usize, usize)) {
    let mut a = matrix(rng, d);
    let t @ (x, y, z) = triangle(rng, d);
    let shared = vector(rng, d);
    for (i, j) in [(x, y), (x, z), (y, z)] {
        a.set_column(EdgePair { i, j }.index(d), &shared);
    }
    (a, t)
}
