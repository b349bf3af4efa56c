//! Edge d-partitions of the complete graph `K_{2d}`.
//!
//! Vertices are `1..=2d`, edges are ordered pairs `(i, j)` with `i < j`, and
//! every per-edge vector in this crate is laid out in dictionary order
//! `(1,2) < (1,3) < ... < (1,2d) < (2,3) < ... < (2d-1,2d)`.
//!
//! A partition is stored as its color vector: entry `k` holds the color
//! (`1..=d`) of the `k`-th edge in dictionary order.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::RollbackUnionFind;

/// Largest width the enumerator accepts at all.
pub const MAX_ENUM_WIDTH: usize = 4;

/// Default node budget. A full `d = 3` search needs well under a million
/// nodes; `d = 4` exceeds this by orders of magnitude.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

/// Number of edges of `K_{2d}`.
pub const fn edge_count(d: usize) -> usize {
    d * (2 * d - 1)
}

/// An edge `(i, j)` of a complete graph, `1 <= i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePair {
    pub i: usize,
    pub j: usize,
}

impl EdgePair {
    /// Validated edge of `K_{2d}`.
    pub fn new(d: usize, i: usize, j: usize) -> Result<Self> {
        let n = 2 * d;
        if i == 0 || i >= j || j > n {
            return Err(Error::InvalidEdge { i, j, n });
        }
        Ok(Self { i, j })
    }

    /// Column index of this edge in dictionary order among the edges of `K_{2d}`.
    pub fn index(self, d: usize) -> usize {
        let n = 2 * d;
        let before: usize = (1..self.i).map(|a| n - a).sum();
        before + (self.j - self.i - 1)
    }

    /// Inverse of [`EdgePair::index`].
    pub fn from_index(d: usize, mut idx: usize) -> Self {
        let n = 2 * d;
        let mut i = 1;
        while idx >= n - i {
            idx -= n - i;
            i += 1;
        }
        Self { i, j: i + 1 + idx }
    }

    /// Whether `v` is an endpoint.
    pub fn touches(self, v: usize) -> bool {
        self.i == v || self.j == v
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FromStr for EdgePair {
    type Err = Error;

    /// Parses `"(i,j)"` (whitespace tolerated). Range checks against a width
    /// happen later, via [`EdgePair::new`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"(i,j)\", got {s:?}"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let i = a.trim().parse().map_err(|_| bad())?;
        let j = b.trim().parse().map_err(|_| bad())?;
        if i == 0 || i >= j {
            return Err(bad());
        }
        Ok(Self { i, j })
    }
}

/// All edges of `K_{2d}` in dictionary order.
pub fn edges(d: usize) -> impl Iterator<Item = EdgePair> {
    let n = 2 * d;
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| EdgePair { i, j }))
}

/// All triangles `x < y < z` of `K_{2d}`, lexicographically.
pub fn triangles(d: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    let n = 2 * d;
    (1..=n).flat_map(move |x| (x + 1..=n).flat_map(move |y| (y + 1..=n).map(move |z| (x, y, z))))
}

/// An edge d-partition of `K_{2d}`, stored as its dictionary-order color vector.
///
/// Ordering compares color vectors lexicographically, which is the canonical
/// order used by the enumerator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct EdgeDPartition {
    d: usize,
    colors: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    d: usize,
    colors: Vec<u8>,
}

impl TryFrom<PartitionJson> for EdgeDPartition {
    type Error = Error;

    fn try_from(raw: PartitionJson) -> Result<Self> {
        Self::new(raw.d, raw.colors)
    }
}

impl From<EdgeDPartition> for PartitionJson {
    fn from(p: EdgeDPartition) -> Self {
        Self {
            d: p.d,
            colors: p.colors,
        }
    }
}

impl EdgeDPartition {
    /// Builds a partition from a color vector (colors `1..=d`, dictionary order).
    pub fn new(d: usize, colors: Vec<u8>) -> Result<Self> {
        if d == 0 || d > u8::MAX as usize {
            return Err(Error::InvalidWidth(d));
        }
        if colors.len() != edge_count(d) {
            return Err(Error::MalformedPartition(format!(
                "expected {} colors for d={d}, got {}",
                edge_count(d),
                colors.len()
            )));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c as usize > d) {
            return Err(Error::MalformedPartition(format!(
                "color {c} outside 1..={d}"
            )));
        }
        Ok(Self { d, colors })
    }

    pub(crate) fn from_raw(d: usize, colors: Vec<u8>) -> Self {
        debug_assert_eq!(colors.len(), edge_count(d));
        Self { d, colors }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Color (`1..=d`) of edge `e`.
    pub fn color(&self, e: EdgePair) -> usize {
        self.colors[e.index(self.d)] as usize
    }

    /// Edges of color class `c` in dictionary order.
    pub fn class(&self, c: usize) -> Vec<EdgePair> {
        edges(self.d)
            .zip(&self.colors)
            .filter(|&(_, &k)| k as usize == c)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.d];
        for &c in &self.colors {
            sizes[c as usize - 1] += 1;
        }
        sizes
    }

    /// Every class has exactly `2d - 1` edges.
    pub fn is_homogeneous(&self) -> bool {
        self.class_sizes().iter().all(|&s| s == 2 * self.d - 1)
    }

    /// Every class is an acyclic edge set.
    pub fn is_cycle_free(&self) -> bool {
        (1..=self.d).all(|c| class_is_acyclic(self.d, &self.colors, c as u8))
    }

    pub fn is_homogeneous_cycle_free(&self) -> bool {
        self.is_homogeneous() && self.is_cycle_free()
    }
}

/// Free-function form of [`EdgeDPartition::is_cycle_free`].
pub fn is_cycle_free(p: &EdgeDPartition) -> bool {
    p.is_cycle_free()
}

fn class_is_acyclic(d: usize, colors: &[u8], c: u8) -> bool {
    let mut uf = RollbackUnionFind::new(2 * d);
    edges(d)
        .zip(colors)
        .filter(|&(_, &k)| k == c)
        .all(|(e, _)| uf.union(e.i - 1, e.j - 1))
}

/// Which family [`enumerate_partitions`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumMode {
    /// Every edge d-partition (every coloring). Only allowed for `d <= 2`.
    All,
    /// The homogeneous cycle-free partitions, i.e. ordered decompositions of
    /// `K_{2d}` into `d` spanning trees.
    HomogeneousCycleFree,
}

#[derive(Debug, Clone)]
pub struct EnumConfig {
    /// Maximum number of search nodes before giving up.
    pub node_budget: u64,
    /// Split the search over the color of the first edge and run the
    /// branches on the rayon pool.
    pub parallel: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            parallel: true,
        }
    }
}

impl EnumConfig {
    /// Default config with the budget overridden by `S2DET_NODE_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(b) = std::env::var("S2DET_NODE_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            cfg.node_budget = b;
        }
        cfg
    }
}

/// Enumerates edge d-partitions of `K_{2d}` in canonical (lexicographic
/// color-vector) order.
pub fn enumerate_partitions(
    d: usize,
    mode: EnumMode,
    config: &EnumConfig,
) -> Result<Vec<EdgeDPartition>> {
    if d == 0 {
        return Err(Error::InvalidWidth(d));
    }
    match mode {
        EnumMode::All => {
            if d > 2 {
                return Err(Error::WidthTooLarge { d, max: 2 });
            }
            Ok(all_colorings(d))
        }
        EnumMode::HomogeneousCycleFree => {
            if d > MAX_ENUM_WIDTH {
                return Err(Error::WidthTooLarge {
                    d,
                    max: MAX_ENUM_WIDTH,
                });
            }
            let search = TreeSearch::new(d, config.node_budget, |_, _| true);
            let out = search.run(config.parallel)?;
            Ok(out
                .into_iter()
                .map(|c| EdgeDPartition::from_raw(d, c))
                .collect())
        }
    }
}

/// Homogeneous cycle-free partitions in which every edge `e` has a color `c`
/// with `allowed(e, c)`, in canonical order.
///
/// Disallowed colors are pruned during the search, so tight restrictions
/// stay cheap even where the full enumeration is out of reach.
pub fn enumerate_restricted(
    d: usize,
    allowed: impl Fn(EdgePair, usize) -> bool,
    config: &EnumConfig,
) -> Result<Vec<EdgeDPartition>> {
    if d == 0 {
        return Err(Error::InvalidWidth(d));
    }
    if d > MAX_ENUM_WIDTH {
        return Err(Error::WidthTooLarge {
            d,
            max: MAX_ENUM_WIDTH,
        });
    }
    let search = TreeSearch::new(d, config.node_budget, allowed);
    let out = search.run(config.parallel)?;
    Ok(out
        .into_iter()
        .map(|c| EdgeDPartition::from_raw(d, c))
        .collect())
}

fn all_colorings(d: usize) -> Vec<EdgeDPartition> {
    let m = edge_count(d);
    let mut colors = vec![1u8; m];
    let mut out = Vec::new();
    loop {
        out.push(EdgeDPartition::from_raw(d, colors.clone()));
        // odometer increment, last edge fastest, keeps lexicographic order
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if (colors[k] as usize) < d {
                colors[k] += 1;
                break;
            }
            colors[k] = 1;
        }
    }
}

/// Backtracking search for ordered spanning-tree decompositions.
struct TreeSearch {
    d: usize,
    edges: Vec<(usize, usize)>,
    /// Bit `c` of `allowed[k]` permits 0-based color `c` on edge `k`.
    allowed: Vec<u32>,
    /// `supply[k][c]`: edges at positions `>= k` that permit color `c`.
    supply: Vec<Vec<usize>>,
    budget: u64,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

struct Branch {
    colors: Vec<u8>,
    counts: Vec<usize>,
    forests: Vec<RollbackUnionFind>,
    local_nodes: u64,
    out: Vec<Vec<u8>>,
}

const FLUSH_EVERY: u64 = 1 << 14;

impl TreeSearch {
    fn new(d: usize, budget: u64, allowed: impl Fn(EdgePair, usize) -> bool) -> Self {
        let allowed: Vec<u32> = edges(d)
            .map(|e| {
                (0..d)
                    .filter(|&c| allowed(e, c + 1))
                    .fold(0, |m, c| m | 1 << c)
            })
            .collect();
        let mut supply = vec![vec![0; d]; allowed.len() + 1];
        for k in (0..allowed.len()).rev() {
            for c in 0..d {
                supply[k][c] = supply[k + 1][c] + (allowed[k] >> c & 1) as usize;
            }
        }
        Self {
            d,
            edges: edges(d).map(|e| (e.i - 1, e.j - 1)).collect(),
            allowed,
            supply,
            budget,
            nodes: AtomicU64::new(0),
            aborted: AtomicBool::new(false),
        }
    }

    fn fresh_branch(&self) -> Branch {
        Branch {
            colors: vec![0; self.edges.len()],
            counts: vec![0; self.d],
            forests: (0..self.d)
                .map(|_| RollbackUnionFind::new(2 * self.d))
                .collect(),
            local_nodes: 0,
            out: Vec::new(),
        }
    }

    fn run(&self, parallel: bool) -> Result<Vec<Vec<u8>>> {
        let colors: Vec<u8> = (0..self.d as u8).collect();
        let solve_from = |c: u8| {
            let mut br = self.fresh_branch();
            if self.assign(&mut br, 0, c) {
                self.descend(&mut br, 1);
                self.unassign(&mut br, c);
            }
            self.flush(&mut br);
            br.out
        };
        // The first edge's color is the most significant key, so concatenating
        // the branches in color order keeps the canonical order.
        let parts: Vec<Vec<Vec<u8>>> = if parallel {
            colors.par_iter().map(|&c| solve_from(c)).collect()
        } else {
            colors.iter().map(|&c| solve_from(c)).collect()
        };
        if self.aborted.load(Ordering::Relaxed) {
            return Err(Error::NodeBudgetExceeded {
                d: self.d,
                budget: self.budget,
            });
        }
        Ok(parts.into_iter().flatten().collect())
    }

    fn flush(&self, br: &mut Branch) {
        let total = self.nodes.fetch_add(br.local_nodes, Ordering::Relaxed) + br.local_nodes;
        br.local_nodes = 0;
        if total > self.budget {
            self.aborted.store(true, Ordering::Relaxed);
        }
    }

    /// Colors are 0-based inside the search.
    fn assign(&self, br: &mut Branch, k: usize, c: u8) -> bool {
        let ci = c as usize;
        if self.allowed[k] & (1 << ci) == 0 || br.counts[ci] == 2 * self.d - 1 {
            return false;
        }
        let (u, v) = self.edges[k];
        if !br.forests[ci].union(u, v) {
            return false;
        }
        br.counts[ci] += 1;
        br.colors[k] = c + 1;
        true
    }

    fn unassign(&self, br: &mut Branch, c: u8) {
        let ci = c as usize;
        br.forests[ci].rollback();
        br.counts[ci] -= 1;
    }

    fn descend(&self, br: &mut Branch, k: usize) {
        br.local_nodes += 1;
        if br.local_nodes >= FLUSH_EVERY {
            self.flush(br);
        }
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        if k == self.edges.len() {
            br.out.push(br.colors.clone());
            return;
        }
        // every class must still be able to reach 2d - 1 edges
        let need = 2 * self.d - 1;
        if (0..self.d).any(|c| br.counts[c] + self.supply[k][c] < need) {
            return;
        }
        for c in 0..self.d as u8 {
            if self.assign(br, k, c) {
                self.descend(br, k + 1);
                self.unassign(br, c);
            }
        }
    }
}

fn check_triangle(d: usize, x: usize, y: usize, z: usize) -> Result<[usize; 3]> {
    let n = 2 * d;
    if !(1 <= x && x < y && y < z && z <= n) {
        return Err(Error::InvalidTriangle { x, y, z, n });
    }
    Ok([
        EdgePair { i: x, j: y }.index(d),
        EdgePair { i: x, j: z }.index(d),
        EdgePair { i: y, j: z }.index(d),
    ])
}

/// The involution `p^(x,y,z)`: the unique other homogeneous cycle-free
/// partition that agrees with `p` off the triangle `(x,y,z)`.
///
/// Homogeneity pins the multiset of the three triangle colors, so only its
/// rearrangements are tried.
pub fn involution(p: &EdgeDPartition, x: usize, y: usize, z: usize) -> Result<EdgeDPartition> {
    let d = p.d;
    let idx = check_triangle(d, x, y, z)?;
    if !p.is_homogeneous_cycle_free() {
        return Err(Error::NotHomogeneousCycleFree);
    }
    involution_of_valid(p, x, y, z, idx)
}

/// [`involution`] for a partition already known to be homogeneous cycle-free.
pub(crate) fn involution_trusted(
    p: &EdgeDPartition,
    x: usize,
    y: usize,
    z: usize,
) -> Result<EdgeDPartition> {
    let idx = check_triangle(p.d, x, y, z)?;
    involution_of_valid(p, x, y, z, idx)
}

fn involution_of_valid(
    p: &EdgeDPartition,
    x: usize,
    y: usize,
    z: usize,
    idx: [usize; 3],
) -> Result<EdgeDPartition> {
    let d = p.d;
    let orig = idx.map(|k| p.colors[k]);
    let mut candidates = Vec::new();
    let mut seen: Vec<[u8; 3]> = Vec::with_capacity(6);
    for perm in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let trial = perm.map(|s| orig[s]);
        if trial == orig || seen.contains(&trial) {
            continue;
        }
        seen.push(trial);
        let mut colors = p.colors.clone();
        for (k, c) in idx.iter().zip(trial) {
            colors[*k] = c;
        }
        // only classes touched by the triangle can have changed
        if orig.iter().all(|&c| class_is_acyclic(d, &colors, c)) {
            candidates.push(colors);
        }
    }
    if candidates.len() != 1 {
        return Err(Error::InvolutionNotUnique {
            x,
            y,
            z,
            found: candidates.len(),
        });
    }
    Ok(EdgeDPartition::from_raw(d, candidates.pop().unwrap()))
}

/// Same contract as [`involution`], but scans all `d^3` recolorings of the
/// triangle and filters by the full homogeneous cycle-free predicate. Used to
/// cross-check the restricted search.
pub fn involution_exhaustive(
    p: &EdgeDPartition,
    x: usize,
    y: usize,
    z: usize,
) -> Result<EdgeDPartition> {
    let d = p.d;
    let idx = check_triangle(d, x, y, z)?;
    if !p.is_homogeneous_cycle_free() {
        return Err(Error::NotHomogeneousCycleFree);
    }
    let mut candidates = Vec::new();
    for a in 1..=d as u8 {
        for b in 1..=d as u8 {
            for c in 1..=d as u8 {
                let mut colors = p.colors.clone();
                colors[idx[0]] = a;
                colors[idx[1]] = b;
                colors[idx[2]] = c;
                let q = EdgeDPartition::from_raw(d, colors);
                if q != *p && q.is_homogeneous_cycle_free() {
                    candidates.push(q);
                }
            }
        }
    }
    if candidates.len() != 1 {
        return Err(Error::InvolutionNotUnique {
            x,
            y,
            z,
            found: candidates.len(),
        });
    }
    Ok(candidates.pop().unwrap())
}

/// Position of an edge inside its twin star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegRole {
    Left,
    Center,
    Right,
}

/// The twin star graph `TS_d(2b-1, 2b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinStar {
    pub d: usize,
    pub b: usize,
    /// Left legs (attached at `2b-1`), position `n-1` has leg number `n`.
    pub left: Vec<EdgePair>,
    pub center: EdgePair,
    /// Right legs (attached at `2b`), position `n-1` has leg number `n`.
    pub right: Vec<EdgePair>,
}

impl TwinStar {
    pub fn edges(&self) -> impl Iterator<Item = EdgePair> + '_ {
        self.left
            .iter()
            .copied()
            .chain(std::iter::once(self.center))
            .chain(self.right.iter().copied())
    }
}

fn ordered(u: usize, v: usize) -> EdgePair {
    EdgePair {
        i: u.min(v),
        j: u.max(v),
    }
}

/// Builds `TS_d(2b-1, 2b)`; legs are listed in leg-number order.
pub fn twin_star(d: usize, b: usize) -> TwinStar {
    assert!(1 <= b && b <= d, "star index {b} outside 1..={d}");
    let (lc, rc) = (2 * b - 1, 2 * b);
    // LL: even vertices before 2b-1, odd vertices after it; natural order.
    let left_ends = (1..=2 * d).filter(|&x| (x < lc && x % 2 == 0) || (x > lc && x % 2 == 1));
    // RL: odd vertices before 2b-1, even vertices after 2b.
    let right_ends = (1..=2 * d).filter(|&x| (x < lc && x % 2 == 1) || (x > rc && x % 2 == 0));
    TwinStar {
        d,
        b,
        left: left_ends.map(|x| ordered(x, lc)).collect(),
        center: EdgePair { i: lc, j: rc },
        right: right_ends.map(|x| ordered(x, rc)).collect(),
    }
}

/// Where an edge sits in the twin-star partition of `K_{2d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegPosition {
    /// Star index `1..=d`.
    pub star: usize,
    pub role: LegRole,
    /// Leg number; `1` for the center edge.
    pub leg: usize,
}

/// Locates `e` among the twin stars `TS_d(1,2), ..., TS_d(2d-1,2d)`.
pub fn leg_locate(d: usize, e: EdgePair) -> LegPosition {
    let EdgePair { i, j } = e;
    debug_assert!(1 <= i && i < j && j <= 2 * d);
    if (i + j) % 2 == 0 {
        // both endpoints share parity; the smaller one is the hub
        let star = i.div_ceil(2);
        if i % 2 == 1 {
            LegPosition {
                star,
                role: LegRole::Left,
                leg: star - 1 + (j - i) / 2,
            }
        } else {
            LegPosition {
                star,
                role: LegRole::Right,
                leg: star - 1 + (j - i) / 2,
            }
        }
    } else {
        let star = j.div_ceil(2);
        if j == i + 1 && i % 2 == 1 {
            LegPosition {
                star,
                role: LegRole::Center,
                leg: 1,
            }
        } else if j % 2 == 1 {
            // (2a, 2b-1) with 2a < 2b-1
            LegPosition {
                star,
                role: LegRole::Left,
                leg: i / 2,
            }
        } else {
            // (2a-1, 2b) with 2a-1 < 2b-1
            LegPosition {
                star,
                role: LegRole::Right,
                leg: i.div_ceil(2),
            }
        }
    }
}

/// The partition `(TS_d(1,2), ..., TS_d(2d-1,2d))` associated with `E^(2)_d`.
pub fn partition_of_e(d: usize) -> EdgeDPartition {
    let colors = edges(d).map(|e| leg_locate(d, e).star as u8).collect();
    EdgeDPartition::from_raw(d, colors)
}
