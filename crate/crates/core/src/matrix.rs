//! `d x d(2d-1)` matrices whose columns are indexed by the edges of `K_{2d}`.
//!
//! Column `(i,j)` holds the vector `v_{i,j}`, so a matrix is the matrix form
//! of the simple tensor `(x)_{i<j} v_{i,j}`. Storage is column-major because
//! almost every operation works column by column.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::combinat::{edge_count, edges, EdgeDPartition, EdgePair};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, TextScalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct S2Matrix<T> {
    d: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for S2Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (c, e) in edges(self.d).enumerate() {
            m.entry(
                &format_args!("{e}"),
                &&self.data[c * self.d..(c + 1) * self.d],
            );
        }
        m.finish()
    }
}

impl<T: Scalar> S2Matrix<T> {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![T::zero(); d * edge_count(d)],
        }
    }

    /// Builds a matrix from its columns in dictionary order.
    pub fn from_columns(d: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidWidth(d));
        }
        if columns.len() != edge_count(d) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} columns for d={d}, got {}",
                edge_count(d),
                columns.len()
            )));
        }
        let mut data = Vec::with_capacity(d * edge_count(d));
        for (col, e) in columns.into_iter().zip(edges(d)) {
            if col.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "column {e} has {} entries, expected {d}",
                    col.len()
                )));
            }
            data.extend(col);
        }
        Ok(Self { d, data })
    }

    /// Builds a matrix from `d` rows of `d(2d-1)` entries.
    pub fn from_rows(d: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidWidth(d));
        }
        let m = edge_count(d);
        if rows.len() != d || rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "expected {d} rows of {m} entries"
            )));
        }
        let mut out = Self::zeros(d);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                out.data[c * d + r] = v;
            }
        }
        Ok(out)
    }

    /// Builds a matrix from a function of `(row, column)` (0-based).
    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let m = edge_count(d);
        let data = (0..m)
            .flat_map(|c| (0..d).map(move |r| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self { d, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_columns(&self) -> usize {
        edge_count(self.d)
    }

    /// Entry at 0-based `row` and column index `col`.
    pub fn at(&self, row: usize, col: usize) -> &T {
        &self.data[col * self.d + row]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.data[col * self.d + row]
    }

    /// Entry `v^k_{i,j}` with 1-based row `k`.
    pub fn entry(&self, k: usize, e: EdgePair) -> &T {
        self.at(k - 1, e.index(self.d))
    }

    pub fn column(&self, col: usize) -> &[T] {
        &self.data[col * self.d..(col + 1) * self.d]
    }

    pub fn column_of(&self, e: EdgePair) -> &[T] {
        self.column(e.index(self.d))
    }

    pub fn set_column(&mut self, col: usize, v: &[T]) {
        assert_eq!(v.len(), self.d);
        self.data[col * self.d..(col + 1) * self.d].clone_from_slice(v);
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.d)
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.d)
            .map(|r| self.columns().map(|c| c[r].clone()).collect())
            .collect()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> S2Matrix<U> {
        S2Matrix {
            d: self.d,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_width(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self { d: self.d, data })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    /// `A x` for a vector `x` indexed by columns in dictionary order.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.num_columns() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, expected {}",
                x.len(),
                self.num_columns()
            )));
        }
        let mut out = vec![T::zero(); self.d];
        for (col, xv) in self.columns().zip(x) {
            if xv.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(col) {
                *o = o.clone() + a.clone() * xv.clone();
            }
        }
        Ok(out)
    }

    pub(crate) fn check_same_width(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "width {} vs {}",
                self.d, other.d
            )));
        }
        Ok(())
    }
}

/// `ind(i,j)`: the row (1-based) of the single nonzero entry of column `(i,j)`
/// of `I^{S2}_d`.
pub fn ind(i: usize, j: usize) -> usize {
    if (i + j) % 2 == 0 {
        i.div_ceil(2)
    } else {
        j.div_ceil(2)
    }
}

pub fn ind_of(e: EdgePair) -> usize {
    ind(e.i, e.j)
}

/// `I^{S2}_d`, the matrix form of `E^(2)_d`: column `(i,j)` is `e_{ind(i,j)}`.
pub fn identity_e<T: Scalar>(d: usize) -> S2Matrix<T> {
    let mut out = S2Matrix::zeros(d);
    for (c, e) in edges(d).enumerate() {
        *out.at_mut(ind_of(e) - 1, c) = T::one();
    }
    out
}

/// The diagonal indicator set `DI_d[2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalIndicator {
    pub d: usize,
    /// `(i, j, k)` triples in dictionary order of `(i, j)`.
    pub triples: Vec<(usize, usize, usize)>,
}

impl DiagonalIndicator {
    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        self.triples
            .binary_search_by(|t| (t.0, t.1).cmp(&(i, j)))
            .is_ok_and(|p| self.triples[p].2 == k)
    }
}

pub fn diagonal_indicator(d: usize) -> DiagonalIndicator {
    DiagonalIndicator {
        d,
        triples: edges(d).map(|e| (e.i, e.j, ind_of(e))).collect(),
    }
}

/// The S2-diagonal as an indexed family: one value per edge, dictionary order.
#[derive(Debug, Clone, PartialEq)]
pub struct S2Diagonal<T> {
    pub d: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> S2Diagonal<T> {
    pub fn get(&self, e: EdgePair) -> &T {
        &self.values[e.index(self.d)]
    }

    /// Product of all `d(2d-1)` entries.
    pub fn product(&self) -> T {
        self.values.iter().fold(T::one(), |acc, v| acc * v.clone())
    }

    /// Distinct values in first-seen order (the set view).
    pub fn value_set(&self) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for v in &self.values {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn contains_zero(&self) -> bool {
        self.values.iter().any(|v| v.is_zero())
    }
}

pub fn s2_diagonal<T: Scalar>(a: &S2Matrix<T>) -> S2Diagonal<T> {
    let values = edges(a.d)
        .enumerate()
        .map(|(c, e)| a.at(ind_of(e) - 1, c).clone())
        .collect();
    S2Diagonal { d: a.d, values }
}

/// Every column `(i,j)` vanishes below row `ind(i,j)`.
pub fn is_s2_upper<T: Scalar>(a: &S2Matrix<T>) -> bool {
    edges(a.d)
        .zip(a.columns())
        .all(|(e, col)| col[ind_of(e)..].iter().all(T::is_zero))
}

/// Every column `(i,j)` vanishes above row `ind(i,j)`.
pub fn is_s2_lower<T: Scalar>(a: &S2Matrix<T>) -> bool {
    edges(a.d)
        .zip(a.columns())
        .all(|(e, col)| col[..ind_of(e) - 1].iter().all(T::is_zero))
}

/// Matrix form of the basis tensor of `p`: column `(i,j)` is `e_{color(i,j)}`.
pub fn basis_matrix_from_partition<T: Scalar>(p: &EdgeDPartition) -> S2Matrix<T> {
    let mut out = S2Matrix::zeros(p.d());
    for (c, &k) in p.colors().iter().enumerate() {
        *out.at_mut(k as usize - 1, c) = T::one();
    }
    out
}

/// Inverse of [`basis_matrix_from_partition`]; fails unless every column is a
/// standard basis vector.
pub fn partition_from_basis_matrix<T: Scalar>(a: &S2Matrix<T>) -> Result<EdgeDPartition> {
    let mut colors = Vec::with_capacity(a.num_columns());
    for (e, col) in edges(a.d).zip(a.columns()) {
        let mut hit = None;
        for (r, v) in col.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !v.is_one() || hit.is_some() {
                return Err(Error::NotBasisMatrix(e));
            }
            hit = Some(r);
        }
        let r = hit.ok_or(Error::NotBasisMatrix(e))?;
        colors.push(r as u8 + 1);
    }
    EdgeDPartition::new(a.d, colors)
}

// ---- JSON ----------------------------------------------------------------

/// Parses one JSON entry: a string such as `"-3/7"` or an integer literal.
pub(crate) fn scalar_from_json<T: TextScalar>(
    v: &serde_json::Value,
) -> std::result::Result<T, String> {
    let text = match v {
        serde_json::Value::String(s) => s.trim().to_string(),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        other => return Err(format!("expected a rational string, got {other}")),
    };
    text.parse::<T>()
        .map_err(|_| format!("cannot parse {text:?} as a scalar"))
}

#[derive(Serialize)]
struct MatrixOut {
    d: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct MatrixIn {
    d: usize,
    #[serde(default)]
    entries: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default)]
    columns: Option<BTreeMap<String, Vec<serde_json::Value>>>,
}

impl<T: TextScalar> Serialize for S2Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        MatrixOut { d: self.d, entries }.serialize(serializer)
    }
}

impl<'de, T: TextScalar> Deserialize<'de> for S2Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixIn::deserialize(deserializer)?;
        let d = raw.d;
        if d == 0 {
            return Err(de::Error::custom("d must be positive"));
        }
        let parse_vec = |vals: &[serde_json::Value]| -> std::result::Result<Vec<T>, D::Error> {
            vals.iter()
                .map(|v| scalar_from_json(v).map_err(de::Error::custom))
                .collect()
        };
        match (raw.entries, raw.columns) {
            (Some(rows), None) => {
                let rows = rows
                    .iter()
                    .map(|r| parse_vec(r))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                S2Matrix::from_rows(d, rows).map_err(de::Error::custom)
            }
            (None, Some(cols)) => {
                let mut slots: Vec<Option<Vec<T>>> = vec![None; edge_count(d)];
                for (key, vals) in &cols {
                    let e: EdgePair = key.parse().map_err(de::Error::custom)?;
                    let e = EdgePair::new(d, e.i, e.j).map_err(de::Error::custom)?;
                    slots[e.index(d)] = Some(parse_vec(vals)?);
                }
                let columns = slots
                    .into_iter()
                    .zip(edges(d))
                    .map(|(s, e)| s.ok_or_else(|| de::Error::custom(format!("missing column {e}"))))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                S2Matrix::from_columns(d, columns).map_err(de::Error::custom)
            }
            _ => Err(de::Error::custom(
                "matrix needs exactly one of \"entries\" or \"columns\"",
            )),
        }
    }
}
