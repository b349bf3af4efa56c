//! Leg submatrices, Leg Identifying Multiplication, and the LU-style
//! factorizations built on them.
//!
//! Every column of a `d x d(2d-1)` matrix belongs to exactly one twin star
//! `TS_d(2a-1,2a)` as its center, a left leg or a right leg. Collecting, for a
//! fixed role and leg number, the column of each star `a = 1..d` gives a
//! `d x d` block. There are `2d - 1` blocks: `C`, `L[1..d-1]`, `R[1..d-1]`.
//! LIM multiplies blocks with the same label and reassembles.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::combinat::{edge_count, edges, twin_star, EdgePair};
use crate::error::{Error, Result};
use crate::matrix::{ind_of, scalar_from_json, S2Matrix};
use crate::scalar::{Field, Scalar, TextScalar};

/// Label of a leg submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    Center,
    /// Left legs with the given leg number (`1..=d-1`).
    Left(usize),
    /// Right legs with the given leg number (`1..=d-1`).
    Right(usize),
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Center => write!(f, "C"),
            Block::Left(n) => write!(f, "L[{n}]"),
            Block::Right(n) => write!(f, "R[{n}]"),
        }
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix<T> {
    order: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.chunks(self.order.max(1)))
            .finish()
    }
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![T::zero(); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..order * order)
            .map(|k| f(k / order, k % order))
            .collect();
        Self { order, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::DimensionMismatch(format!(
                "rows of a {order}x{order} matrix must have {order} entries"
            )));
        }
        Ok(Self {
            order,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.order + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.data[row * self.order + col]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.order.max(1))
            .map(<[T]>::to_vec)
            .collect()
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.order).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch(format!(
                "order {} vs {}",
                self.order, other.order
            )));
        }
        let n = self.order;
        Ok(Self::from_fn(n, |r, c| {
            (0..n).fold(T::zero(), |acc, k| {
                acc + self.get(r, k).clone() * other.get(k, c).clone()
            })
        }))
    }

    /// Zero strictly below the diagonal.
    pub fn is_upper(&self) -> bool {
        (0..self.order).all(|r| (0..r).all(|c| self.get(r, c).is_zero()))
    }

    /// Zero strictly above the diagonal.
    pub fn is_lower(&self) -> bool {
        (0..self.order).all(|r| (r + 1..self.order).all(|c| self.get(r, c).is_zero()))
    }

    /// The ordinary diagonal.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.order).map(|k| self.get(k, k).clone()).collect()
    }
}

/// Ordinary determinant by Gaussian elimination with row swaps.
pub fn det_classic<T: Field>(m: &SquareMatrix<T>) -> T {
    let n = m.order;
    let mut a = m.rows();
    let mut det = T::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return T::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det = det * pivot.clone();
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone() / pivot.clone();
            for c in k..n {
                let delta = f.clone() * a[k][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Doolittle factorization `M = L U`, `L` unit lower triangular, no pivoting.
///
/// Fails with [`Error::ZeroPivot`] naming the first vanishing leading
/// principal minor.
pub fn lu_classic<T: Field>(m: &SquareMatrix<T>) -> Result<(SquareMatrix<T>, SquareMatrix<T>)> {
    let n = m.order;
    let mut l = SquareMatrix::<T>::identity(n);
    let mut u = SquareMatrix::<T>::zeros(n);
    for k in 0..n {
        for j in k..n {
            let s = (0..k).fold(T::zero(), |acc, s| {
                acc + l.get(k, s).clone() * u.get(s, j).clone()
            });
            *u.get_mut(k, j) = m.get(k, j).clone() - s;
        }
        let pivot = u.get(k, k).clone();
        if pivot.is_zero() {
            return Err(Error::ZeroPivot { order: k + 1 });
        }
        for i in k + 1..n {
            let s = (0..k).fold(T::zero(), |acc, s| {
                acc + l.get(i, s).clone() * u.get(s, k).clone()
            });
            *l.get_mut(i, k) = (m.get(i, k).clone() - s) / pivot.clone();
        }
    }
    Ok((l, u))
}

/// Column indices (dictionary order) making up each leg submatrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegLayout {
    pub d: usize,
    /// `center[a]` is the column of `(2a+1, 2a+2)` (0-based star `a`).
    pub center: Vec<usize>,
    /// `left[n-1][a]` is the column of the left leg of star `a+1` with leg number `n`.
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

impl LegLayout {
    pub fn new(d: usize) -> Self {
        let stars: Vec<_> = (1..=d).map(|b| twin_star(d, b)).collect();
        let idx = |e: EdgePair| e.index(d);
        Self {
            d,
            center: stars.iter().map(|s| idx(s.center)).collect(),
            left: (0..d - 1)
                .map(|n| stars.iter().map(|s| idx(s.left[n])).collect())
                .collect(),
            right: (0..d - 1)
                .map(|n| stars.iter().map(|s| idx(s.right[n])).collect())
                .collect(),
        }
    }

    pub fn columns(&self, block: Block) -> &[usize] {
        match block {
            Block::Center => &self.center,
            Block::Left(n) => &self.left[n - 1],
            Block::Right(n) => &self.right[n - 1],
        }
    }

    /// All block labels: `C`, then `L[1..]`, then `R[1..]`.
    pub fn blocks(&self) -> Vec<Block> {
        let legs = 1..self.d;
        std::iter::once(Block::Center)
            .chain(legs.clone().map(Block::Left))
            .chain(legs.map(Block::Right))
            .collect()
    }
}

/// The `2d - 1` leg submatrices of an S2 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegDecomposition<T> {
    pub d: usize,
    pub center: SquareMatrix<T>,
    /// `left[n-1]` is `A^L_n`.
    pub left: Vec<SquareMatrix<T>>,
    /// `right[n-1]` is `A^R_n`.
    pub right: Vec<SquareMatrix<T>>,
}

impl<T: Scalar> LegDecomposition<T> {
    pub fn block(&self, b: Block) -> &SquareMatrix<T> {
        match b {
            Block::Center => &self.center,
            Block::Left(n) => &self.left[n - 1],
            Block::Right(n) => &self.right[n - 1],
        }
    }

    /// Blocks in the order of [`LegLayout::blocks`].
    pub fn blocks(&self) -> impl Iterator<Item = (Block, &SquareMatrix<T>)> {
        std::iter::once((Block::Center, &self.center))
            .chain(
                self.left
                    .iter()
                    .enumerate()
                    .map(|(n, m)| (Block::Left(n + 1), m)),
            )
            .chain(
                self.right
                    .iter()
                    .enumerate()
                    .map(|(n, m)| (Block::Right(n + 1), m)),
            )
    }

    fn try_map<U>(
        &self,
        mut f: impl FnMut(Block, &SquareMatrix<T>) -> Result<SquareMatrix<U>>,
    ) -> Result<LegDecomposition<U>> {
        Ok(LegDecomposition {
            d: self.d,
            center: f(Block::Center, &self.center)?,
            left: self
                .left
                .iter()
                .enumerate()
                .map(|(n, m)| f(Block::Left(n + 1), m))
                .collect::<Result<_>>()?,
            right: self
                .right
                .iter()
                .enumerate()
                .map(|(n, m)| f(Block::Right(n + 1), m))
                .collect::<Result<_>>()?,
        })
    }

    fn check_shape(&self) -> Result<()> {
        let ok = self.d >= 1
            && self.left.len() == self.d - 1
            && self.right.len() == self.d - 1
            && self.blocks().all(|(_, m)| m.order() == self.d);
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "leg decomposition for d={} needs 1 + 2*{} blocks of order {}",
                self.d,
                self.d.saturating_sub(1),
                self.d
            )));
        }
        Ok(())
    }
}

pub fn leg_submatrices<T: Scalar>(a: &S2Matrix<T>) -> LegDecomposition<T> {
    let d = a.d();
    let layout = LegLayout::new(d);
    let gather = |cols: &[usize]| SquareMatrix::from_fn(d, |r, c| a.at(r, cols[c]).clone());
    LegDecomposition {
        d,
        center: gather(&layout.center),
        left: layout.left.iter().map(|cols| gather(cols)).collect(),
        right: layout.right.iter().map(|cols| gather(cols)).collect(),
    }
}

/// Inverse of [`leg_submatrices`].
pub fn assemble<T: Scalar>(dec: &LegDecomposition<T>) -> Result<S2Matrix<T>> {
    dec.check_shape()?;
    let layout = LegLayout::new(dec.d);
    let mut out = S2Matrix::zeros(dec.d);
    for (b, m) in dec.blocks() {
        for (star, &col) in layout.columns(b).iter().enumerate() {
            out.set_column(col, &m.column(star));
        }
    }
    Ok(out)
}

/// Leg Identifying Multiplication `A ⊙ B`.
pub fn lim_multiply<T: Scalar>(a: &S2Matrix<T>, b: &S2Matrix<T>) -> Result<S2Matrix<T>> {
    a.check_same_width(b)?;
    let (da, db) = (leg_submatrices(a), leg_submatrices(b));
    let prod = da.try_map(|blk, m| m.mul(db.block(blk)))?;
    assemble(&prod)
}

/// Factors `A = L ⊙ U` with `L` S2-lower triangular with unit S2-diagonal and
/// `U` S2-upper triangular, by classical LU on every leg submatrix.
pub fn s2_lu<T: Field>(a: &S2Matrix<T>) -> Result<(S2Matrix<T>, S2Matrix<T>)> {
    let dec = leg_submatrices(a);
    let mut uppers = Vec::with_capacity(2 * a.d() - 1);
    let lowers = dec.try_map(|blk, m| {
        let (l, u) = lu_classic(m).map_err(|e| match e {
            Error::ZeroPivot { order } => Error::LegZeroPivot { block: blk, order },
            other => other,
        })?;
        uppers.push(u);
        Ok(l)
    })?;
    let mut it = uppers.into_iter();
    let upper = LegDecomposition {
        d: dec.d,
        center: it.next().unwrap(),
        left: it.by_ref().take(dec.d - 1).collect(),
        right: it.collect(),
    };
    Ok((assemble(&lowers)?, assemble(&upper)?))
}

/// `constant + sum_col coefficients[col] * x^(col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineExpr<T> {
    pub d: usize,
    pub constant: T,
    /// One coefficient per column, dictionary order.
    pub coefficients: Vec<T>,
}

impl<T: Scalar> AffineExpr<T> {
    fn constant_only(d: usize, c: T) -> Self {
        Self {
            d,
            constant: c,
            coefficients: vec![T::zero(); edge_count(d)],
        }
    }

    /// Variables with nonzero coefficient.
    pub fn terms(&self) -> Vec<(EdgePair, T)> {
        edges(self.d)
            .zip(&self.coefficients)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        self.coefficients
            .iter()
            .zip(x)
            .fold(self.constant.clone(), |acc, (c, v)| {
                if c.is_zero() {
                    acc
                } else {
                    acc + c.clone() * v.clone()
                }
            })
    }

    fn add_scaled(&mut self, other: &Self, s: &T) {
        self.constant = self.constant.clone() + other.constant.clone() * s.clone();
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            if !b.is_zero() {
                *a = a.clone() + b.clone() * s.clone();
            }
        }
    }
}

impl<T: Field> AffineExpr<T> {
    fn divide(&mut self, s: &T) {
        self.constant = self.constant.clone() / s.clone();
        for a in &mut self.coefficients {
            if !a.is_zero() {
                *a = a.clone() / s.clone();
            }
        }
    }
}

/// Solution family of `A x = b` for S2-upper `A`: every center variable
/// `x^(2a-1,2a)` as an affine function of the non-center variables.
#[derive(Debug, Clone, PartialEq)]
pub struct BackSubstitution<T> {
    pub d: usize,
    /// `centers[a-1]` expresses `x^(2a-1,2a)`.
    pub centers: Vec<AffineExpr<T>>,
}

impl<T: Scalar> BackSubstitution<T> {
    pub fn center(&self, a: usize) -> &AffineExpr<T> {
        &self.centers[a - 1]
    }

    /// Full solution vector: non-center entries copied from `free`, center
    /// entries computed. `free` has one slot per column; center slots are ignored.
    pub fn complete(&self, free: &[T]) -> Vec<T> {
        let mut x = free.to_vec();
        for (a, expr) in self.centers.iter().enumerate() {
            x[EdgePair {
                i: 2 * a + 1,
                j: 2 * a + 2,
            }
            .index(self.d)] = expr.evaluate(free);
        }
        x
    }
}

/// Solves rows `d, d-1, ..., 1` of `A x = b` for the center variables,
/// substituting already-solved centers so only non-center variables remain.
///
/// Only the center entries of the S2-diagonal act as pivots, so only they
/// must be nonzero.
pub fn parametric_back_substitution<T: Field>(
    a: &S2Matrix<T>,
    b: &[T],
) -> Result<BackSubstitution<T>> {
    let d = a.d();
    if b.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries, expected {d}",
            b.len()
        )));
    }
    if !crate::matrix::is_s2_upper(a) {
        return Err(Error::NotUpper);
    }
    let center_col = |s: usize| {
        EdgePair {
            i: 2 * s - 1,
            j: 2 * s,
        }
        .index(d)
    };
    let mut centers: Vec<Option<AffineExpr<T>>> = vec![None; d];
    for row in (1..=d).rev() {
        let pc = center_col(row);
        let pivot = a.at(row - 1, pc).clone();
        if pivot.is_zero() {
            return Err(Error::ZeroDiagonal(EdgePair {
                i: 2 * row - 1,
                j: 2 * row,
            }));
        }
        let mut expr = AffineExpr::constant_only(d, b[row - 1].clone());
        for (col, e) in edges(d).enumerate() {
            let v = a.at(row - 1, col);
            if col == pc || v.is_zero() {
                continue;
            }
            let neg = -v.clone();
            let star = ind_of(e);
            if col == center_col(star) {
                // upper-triangularity puts this center in a later row, already solved
                let solved = centers[star - 1]
                    .as_ref()
                    .expect("later center solved first");
                expr.add_scaled(solved, &neg);
            } else {
                expr.coefficients[col] = expr.coefficients[col].clone() + neg;
            }
        }
        expr.divide(&pivot);
        centers[row - 1] = Some(expr);
    }
    Ok(BackSubstitution {
        d,
        centers: centers.into_iter().map(Option::unwrap).collect(),
    })
}

// ---- JSON ----------------------------------------------------------------

#[derive(Serialize)]
struct SquareOut {
    order: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct SquareIn {
    order: usize,
    entries: Vec<Vec<serde_json::Value>>,
}

impl<T: TextScalar> Serialize for SquareMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        SquareOut {
            order: self.order,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de, T: TextScalar> Deserialize<'de> for SquareMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SquareIn::deserialize(deserializer)?;
        if raw.entries.len() != raw.order {
            return Err(de::Error::custom(format!("expected {} rows", raw.order)));
        }
        let rows = raw
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| scalar_from_json(v).map_err(de::Error::custom))
                    .collect()
            })
            .collect::<std::result::Result<Vec<Vec<T>>, D::Error>>()?;
        SquareMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: TextScalar", deserialize = "T: TextScalar"))]
struct DecompositionJson<T> {
    #[serde(rename = "C")]
    center: SquareMatrix<T>,
    #[serde(rename = "L")]
    left: Vec<SquareMatrix<T>>,
    #[serde(rename = "R")]
    right: Vec<SquareMatrix<T>>,
}

impl<T: TextScalar> Serialize for LegDecomposition<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            center: self.center.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: TextScalar> Deserialize<'de> for LegDecomposition<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DecompositionJson::<T>::deserialize(deserializer)?;
        let dec = LegDecomposition {
            d: raw.center.order(),
            center: raw.center,
            left: raw.left,
            right: raw.right,
        };
        dec.check_shape().map_err(de::Error::custom)?;
        Ok(dec)
    }
}
