//! `det^{S2}` as a signed sum of edge monomials, and the closed form for
//! S2-triangular matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinat::{edge_count, EdgeDPartition};
use crate::error::{Error, Result};
use crate::matrix::{is_s2_lower, is_s2_upper, s2_diagonal, S2Matrix};
use crate::scalar::Scalar;
use crate::signmap::{seed_sign, SignTable, TableCaveat};
use crate::Rational;

/// Widths for which `det^{S2}(E^(2)_d) = (-1)^{d+1}` is established.
pub const KNOWN_IDENTITY_DET_MAX_WIDTH: usize = 10;

/// `M_p(A) = prod_k prod_{(i,j) in class k} v^k_{i,j}`.
pub fn monomial<T: Scalar>(p: &EdgeDPartition, a: &S2Matrix<T>) -> Result<T> {
    if p.d() != a.d() {
        return Err(Error::DimensionMismatch(format!(
            "partition width {} vs matrix width {}",
            p.d(),
            a.d()
        )));
    }
    let mut acc = T::one();
    for (col, &c) in p.colors().iter().enumerate() {
        let v = a.at(c as usize - 1, col);
        if v.is_zero() {
            return Ok(T::zero());
        }
        acc = acc * v.clone();
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetResult<T> {
    pub value: T,
    /// Partitions whose monomial had no zero factor.
    pub terms_evaluated: usize,
    /// Present when the sign table was inconsistent or disconnected.
    pub table_caveat: Option<TableCaveat>,
}

/// Prefix tree over the sign table's color vectors.
///
/// The table is sorted, so sibling partitions share prefixes and a monomial
/// prefix is multiplied once for all of its completions. Subtrees behind a
/// zero entry are skipped entirely.
#[derive(Debug, Clone)]
pub struct DetEvaluator {
    d: usize,
    depth: usize,
    nodes: Vec<Node>,
    caveat: Option<TableCaveat>,
}

#[derive(Debug, Clone, Default)]
struct Node {
    /// `(row, child)`; rows are 0-based colors.
    children: Vec<(u8, u32)>,
    sign: i8,
}

impl DetEvaluator {
    pub fn new(table: &SignTable) -> Self {
        let depth = edge_count(table.d());
        let mut nodes = vec![Node::default()];
        let mut path: Vec<u32> = vec![0; depth + 1];
        let mut prev: Option<&[u8]> = None;
        for (p, s) in table.entries() {
            let colors = p.colors();
            let shared = prev.map_or(0, |q| {
                q.iter().zip(colors).take_while(|(a, b)| a == b).count()
            });
            for k in shared..depth {
                let id = nodes.len() as u32;
                nodes.push(Node::default());
                nodes[path[k] as usize].children.push((colors[k] - 1, id));
                path[k + 1] = id;
            }
            nodes[path[depth] as usize].sign = *s;
            prev = Some(colors);
        }
        Self {
            d: table.d(),
            depth,
            nodes,
            caveat: table.caveat(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn evaluate<T: Scalar>(&self, a: &S2Matrix<T>) -> Result<DetResult<T>> {
        if a.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "matrix width {} vs table width {}",
                a.d(),
                self.d
            )));
        }
        let mut terms = 0;
        let value = self.eval_node(0, 0, a, &mut terms);
        Ok(DetResult {
            value,
            terms_evaluated: terms,
            table_caveat: self.caveat,
        })
    }

    /// Same value as [`DetEvaluator::evaluate`], computed over integers.
    ///
    /// Each column is scaled by the lcm of its denominators. The scaled sum is
    /// taken in `i128` when the magnitudes provably fit and in `BigInt`
    /// otherwise; the column scales are divided out at the end.
    pub fn evaluate_rational(&self, a: &S2Matrix<Rational>) -> Result<DetResult<Rational>> {
        if a.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "matrix width {} vs table width {}",
                a.d(),
                self.d
            )));
        }
        let mut scale = BigInt::one();
        let mut bits = (self.nodes.len().max(2) as f64).log2();
        let mut cols = Vec::with_capacity(a.num_columns());
        for col in a.columns() {
            let lcm = col.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            let ints: Vec<BigInt> = col.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
            let max = ints.iter().map(|v| v.abs()).max().unwrap_or_default();
            if max.is_zero() {
                return Ok(DetResult {
                    value: Rational::zero(),
                    terms_evaluated: 0,
                    table_caveat: self.caveat,
                });
            }
            bits += max.bits() as f64;
            scale *= lcm;
            cols.push(ints);
        }
        let ints = S2Matrix::from_columns(self.d, cols)?;
        let mut terms = 0;
        let sum = if bits < 120.0 {
            let small = ints.map(|v| v.to_i128().expect("entry fits by the bound"));
            BigInt::from(self.eval_node(0, 0, &small, &mut terms))
        } else {
            self.eval_node(0, 0, &ints, &mut terms)
        };
        Ok(DetResult {
            value: Rational::new(sum, scale),
            terms_evaluated: terms,
            table_caveat: self.caveat,
        })
    }

    fn eval_node<T: Scalar>(
        &self,
        node: usize,
        level: usize,
        a: &S2Matrix<T>,
        terms: &mut usize,
    ) -> T {
        let n = &self.nodes[node];
        if level == self.depth {
            *terms += 1;
            return if n.sign < 0 { -T::one() } else { T::one() };
        }
        let mut acc = T::zero();
        for &(row, child) in &n.children {
            let v = a.at(row as usize, level);
            if v.is_zero() {
                continue;
            }
            let sub = self.eval_node(child as usize, level + 1, a, terms);
            if !sub.is_zero() {
                acc = acc + v.clone() * sub;
            }
        }
        acc
    }
}

/// `det^{S2}(A) = sum_p epsilon(p) M_p(A)` over the table.
pub fn det_s2<T: Scalar>(a: &S2Matrix<T>, table: &SignTable) -> Result<DetResult<T>> {
    if a.d() != table.d() {
        return Err(Error::DimensionMismatch(format!(
            "matrix width {} vs table width {}",
            a.d(),
            table.d()
        )));
    }
    DetEvaluator::new(table).evaluate(a)
}

/// [`det_s2`] for rational matrices via [`DetEvaluator::evaluate_rational`].
pub fn det_s2_rational(a: &S2Matrix<Rational>, table: &SignTable) -> Result<DetResult<Rational>> {
    DetEvaluator::new(table).evaluate_rational(a)
}

/// Term-by-term evaluation of the same sum, one monomial per table entry.
pub fn det_s2_by_terms<T: Scalar>(a: &S2Matrix<T>, table: &SignTable) -> Result<DetResult<T>> {
    if a.d() != table.d() {
        return Err(Error::DimensionMismatch(format!(
            "matrix width {} vs table width {}",
            a.d(),
            table.d()
        )));
    }
    let mut value = T::zero();
    for (p, s) in table.entries() {
        let m = monomial(p, a)?;
        value = if *s < 0 { value - m } else { value + m };
    }
    Ok(DetResult {
        value,
        terms_evaluated: table.len(),
        table_caveat: table.caveat(),
    })
}

/// `det^{S2}(E^(2)_d)` where it is known.
pub fn identity_det(d: usize) -> Option<i8> {
    (1..=KNOWN_IDENTITY_DET_MAX_WIDTH)
        .contains(&d)
        .then(|| seed_sign(d))
}

/// `det^{S2}(A) = det^{S2}(E^(2)_d) * prod(diag^{S2}(A))` for S2-upper or
/// S2-lower triangular `A`.
pub fn det_s2_upper_fast<T: Scalar>(a: &S2Matrix<T>) -> Result<T> {
    if !is_s2_upper(a) && !is_s2_lower(a) {
        return Err(Error::NotTriangular);
    }
    let sign = identity_det(a.d()).ok_or(Error::FastPathUnavailable(a.d()))?;
    let prod = s2_diagonal(a).product();
    Ok(if sign < 0 { -prod } else { prod })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{enumerate_partitions, partition_of_e, EnumConfig, EnumMode};
    use crate::matrix::identity_e;
    use crate::signmap::build_sign_table;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn monomial_of_identity() {
        for d in 1..=4 {
            assert_eq!(
                monomial(&partition_of_e(d), &identity_e::<Rational>(d)).unwrap(),
                q(1)
            );
        }
    }

    #[test]
    fn other_monomials_vanish_on_identity_d2() {
        let parts = enumerate_partitions(2, EnumMode::HomogeneousCycleFree, &EnumConfig::default())
            .unwrap();
        let id = identity_e::<Rational>(2);
        for p in parts.iter().filter(|p| **p != partition_of_e(2)) {
            assert_eq!(monomial(p, &id).unwrap(), q(0));
        }
    }

    #[test]
    fn identity_determinants() {
        for d in 1..=3 {
            let t = build_sign_table(d, &EnumConfig::default()).unwrap();
            let r = det_s2(&identity_e::<Rational>(d), &t).unwrap();
            assert_eq!(r.value, q(seed_sign(d) as i64));
            assert_eq!(r.terms_evaluated, 1);
            assert_eq!(r.table_caveat, None);
        }
    }

    #[test]
    fn all_e1_columns_give_zero() {
        let t = build_sign_table(2, &EnumConfig::default()).unwrap();
        let a = S2Matrix::from_fn(2, |r, _| if r == 0 { q(1) } else { q(0) });
        assert_eq!(det_s2(&a, &t).unwrap().value, q(0));
    }

    #[test]
    fn trie_and_term_sums_agree_on_integer_matrix() {
        let t = build_sign_table(2, &EnumConfig::default()).unwrap();
        let a = S2Matrix::from_fn(2, |r, c| (r as i64 * 7 + c as i64 * 3) % 5 - 2);
        assert_eq!(
            det_s2(&a, &t).unwrap().value,
            det_s2_by_terms(&a, &t).unwrap().value
        );
    }

    #[test]
    fn integer_scaled_evaluation_agrees() {
        let t = build_sign_table(2, &EnumConfig::default()).unwrap();
        let ev = DetEvaluator::new(&t);
        let mut rng = crate::sample::rng(7);
        for _ in 0..50 {
            let a = crate::sample::matrix(&mut rng, 2);
            let r = ev.evaluate_rational(&a).unwrap();
            assert_eq!(r.value, ev.evaluate(&a).unwrap().value);
        }
        // entries large enough to force the BigInt path
        let big = Rational::new(BigInt::from(10).pow(20u32) + 1, BigInt::from(3));
        let a = S2Matrix::from_fn(2, |r, c| big.clone() * q((r * 6 + c * c) as i64 + 1));
        assert_eq!(
            ev.evaluate_rational(&a).unwrap().value,
            ev.evaluate(&a).unwrap().value
        );
        let mut zero_col = identity_e::<Rational>(2);
        zero_col.set_column(3, &[q(0), q(0)]);
        assert_eq!(det_s2_rational(&zero_col, &t).unwrap().value, q(0));
    }

    #[test]
    fn fast_path_rules() {
        assert_eq!(
            det_s2_upper_fast(&identity_e::<Rational>(2)).unwrap(),
            q(-1)
        );
        assert_eq!(det_s2_upper_fast(&identity_e::<Rational>(3)).unwrap(), q(1));
        assert_eq!(det_s2_upper_fast(&identity_e::<i64>(10)).unwrap(), -1);
        assert_eq!(
            det_s2_upper_fast(&identity_e::<i64>(11)),
            Err(Error::FastPathUnavailable(11))
        );
        let full = S2Matrix::from_fn(2, |_, _| q(1));
        assert_eq!(det_s2_upper_fast(&full), Err(Error::NotTriangular));
        let mut zero_diag = identity_e::<Rational>(3);
        *zero_diag.at_mut(0, 0) = q(0);
        assert_eq!(det_s2_upper_fast(&zero_diag).unwrap(), q(0));
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let t = build_sign_table(2, &EnumConfig::default()).unwrap();
        assert!(matches!(
            det_s2(&identity_e::<Rational>(3), &t),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(monomial(&partition_of_e(2), &identity_e::<Rational>(3)).is_err());
    }
}
