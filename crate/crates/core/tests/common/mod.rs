//! Independent oracles shared by the integration tests. Nothing here calls
//! the library code it is used to check.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_traits::{One, Zero};
use s2det::combinat::EnumConfig;
use s2det::signmap::{build_sign_table, SignTable};
use s2det::Rational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Sign tables for d = 1..=3, built once per test binary.
pub fn table(d: usize) -> &'static SignTable {
    static TABLES: [OnceLock<SignTable>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    TABLES[d - 1].get_or_init(|| build_sign_table(d, &EnumConfig::default()).unwrap())
}

/// Edges of `K_n` in dictionary order, 1-based.
pub fn dict_edges(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
        }
    }
    out
}

/// Forest test by connected components: a graph on `n` vertices with `m`
/// edges is a forest iff it has `n - m` components.
pub fn is_forest(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n + 1];
    let mut components = 0;
    for s in 1..=n {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    edges.len() + components == n
}

/// A color vector is a homogeneous cycle-free partition: every class has
/// `2d - 1` edges and is a forest.
pub fn is_hcf(d: usize, colors: &[u8]) -> bool {
    let edges = dict_edges(2 * d);
    (1..=d as u8).all(|c| {
        let class: Vec<_> = edges
            .iter()
            .zip(colors)
            .filter(|(_, &k)| k == c)
            .map(|(e, _)| *e)
            .collect();
        class.len() == 2 * d - 1 && is_forest(2 * d, &class)
    })
}

/// All `d^{d(2d-1)}` colorings filtered by [`is_hcf`], in lexicographic order.
pub fn brute_force_hcf(d: usize) -> Vec<Vec<u8>> {
    let m = d * (2 * d - 1);
    let total = d.pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut colors = vec![0u8; m];
        let mut x = code;
        for k in (0..m).rev() {
            colors[k] = (x % d) as u8 + 1;
            x /= d;
        }
        if is_hcf(d, &colors) {
            out.push(colors);
        }
    }
    out
}

/// Generates every split of the edges into `d` labelled classes of size
/// `2d - 1` (a multinomial number of candidates) and keeps those whose
/// classes are all forests. Sorted lexicographically.
pub fn multinomial_hcf(d: usize) -> Vec<Vec<u8>> {
    let n = 2 * d;
    let edges = dict_edges(n);
    let size = 2 * d - 1;
    let mut out = Vec::new();
    let mut colors = vec![0u8; edges.len()];

    fn choose(
        color: u8,
        d: usize,
        size: usize,
        edges: &[(usize, usize)],
        colors: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        let free: Vec<usize> = (0..edges.len()).filter(|&k| colors[k] == 0).collect();
        if color as usize == d {
            for &k in &free {
                colors[k] = color;
            }
            let class: Vec<_> = free.iter().map(|&k| edges[k]).collect();
            if is_forest(2 * d, &class) {
                out.push(colors.clone());
            }
            for &k in &free {
                colors[k] = 0;
            }
            return;
        }
        // all size-subsets of the free edges, as index combinations
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let class: Vec<_> = idx.iter().map(|&i| edges[free[i]]).collect();
            if is_forest(2 * d, &class) {
                for &i in &idx {
                    colors[free[i]] = color;
                }
                choose(color + 1, d, size, edges, colors, out);
                for &i in &idx {
                    colors[free[i]] = 0;
                }
            }
            // next combination
            let mut p = size;
            while p > 0 && idx[p - 1] == free.len() - size + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for r in p..size {
                idx[r] = idx[r - 1] + 1;
            }
        }
    }

    choose(1, d, size, &edges, &mut colors, &mut out);
    out.sort();
    out
}

/// `I^{S2}_2` as displayed, rows of 0/1.
pub const DISPLAYED_IDENTITY_2: [[i64; 6]; 2] = [[1, 1, 0, 0, 1, 0], [0, 0, 1, 1, 0, 1]];

/// `I^{S2}_3` as displayed.
pub const DISPLAYED_IDENTITY_3: [[i64; 15]; 3] = [
    [1, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1],
];

/// Row (0-based) holding the 1 in each column of the displayed identity.
pub fn displayed_diag_rows(d: usize) -> Vec<usize> {
    match d {
        2 => (0..6)
            .map(|c| (0..2).find(|&r| DISPLAYED_IDENTITY_2[r][c] == 1).unwrap())
            .collect(),
        3 => (0..15)
            .map(|c| (0..3).find(|&r| DISPLAYED_IDENTITY_3[r][c] == 1).unwrap())
            .collect(),
        _ => panic!("no displayed identity for d={d}"),
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut acc = Rational::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * cofactor_det(&minor);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Plain row-by-column product of square matrices given as rows.
pub fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| (0..n).fold(Rational::zero(), |s, k| s + &a[r][k] * &b[k][c]))
                .collect()
        })
        .collect()
}
