mod common;

use common::*;
use proptest::prelude::*;
use s2det::combinat::{edge_count, EdgePair};
use s2det::dets2::det_s2_rational;
use s2det::leg_algebra::{assemble, leg_submatrices, lim_multiply, LegDecomposition};
use s2det::matrix::{identity_e, S2Matrix};
use s2det::{Matrix, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| qr(n, d))
}

fn matrix(d: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(rational(), d * edge_count(d))
        .prop_map(move |v| S2Matrix::from_fn(d, |r, c| v[r * edge_count(d) + c].clone()))
}

fn matrix_d2_or_d3() -> impl Strategy<Value = Matrix> {
    prop_oneof![matrix(2), matrix(3)]
}

proptest! {
    #[test]
    fn edge_index_round_trips(d in 1usize..=6, k in 0usize..66) {
        prop_assume!(k < edge_count(d));
        let e = EdgePair::from_index(d, k);
        prop_assert!(e.i < e.j && e.j <= 2 * d);
        prop_assert_eq!(e.index(d), k);
    }

    #[test]
    fn matrix_json_round_trips(a in matrix_d2_or_d3()) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Matrix>(&s).unwrap(), a);
    }

    #[test]
    fn legs_round_trip(a in matrix_d2_or_d3()) {
        let dec = leg_submatrices(&a);
        let s = serde_json::to_string(&dec).unwrap();
        let back: LegDecomposition<Rational> = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(assemble(&back).unwrap(), a);
    }

    #[test]
    fn identity_is_two_sided_unit(a in matrix_d2_or_d3()) {
        let id = identity_e::<Rational>(a.d());
        prop_assert_eq!(lim_multiply(&id, &a).unwrap(), a.clone());
        prop_assert_eq!(lim_multiply(&a, &id).unwrap(), a);
    }

    #[test]
    fn lim_is_associative_d2(a in matrix(2), b in matrix(2), c in matrix(2)) {
        let left = lim_multiply(&lim_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = lim_multiply(&a, &lim_multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn equal_triangle_columns_give_zero(a in matrix(2), v in prop::collection::vec(rational(), 2)) {
        // three equal columns on (1,2),(1,3),(2,3)
        let mut m = a;
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            m.set_column(EdgePair { i, j }.index(2), &v);
        }
        prop_assert_eq!(det_s2_rational(&m, table(2)).unwrap().value, q(0));
    }

    #[test]
    fn determinant_scales_per_column(a in matrix(2), k in 0usize..6, s in rational()) {
        let mut scaled = a.clone();
        let col: Vec<Rational> = a.column(k).iter().map(|x| x * &s).collect();
        scaled.set_column(k, &col);
        let t = table(2);
        prop_assert_eq!(
            det_s2_rational(&scaled, t).unwrap().value,
            s * det_s2_rational(&a, t).unwrap().value
        );
    }
}
