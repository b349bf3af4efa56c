//! The sign map `epsilon^{S2}_d` on homogeneous cycle-free partitions.
//!
//! Signs are propagated by breadth-first search over the involution graph:
//! partitions are vertices, and `p -- p^(x,y,z)` is an edge for every
//! triangle. The seed is the twin-star partition with sign `(-1)^{d+1}` and
//! every edge flips the sign. A conflict (an odd cycle) or an unreached
//! partition is recorded in the table rather than raised.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::combinat::{
    enumerate_partitions, involution_trusted, partition_of_e, triangles, EdgeDPartition,
    EnumConfig, EnumMode,
};
use crate::error::{Error, Result};

/// `(-1)^{d+1}`.
pub fn seed_sign(d: usize) -> i8 {
    if d % 2 == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    d: usize,
    /// Canonical (sorted) order, so lookups are binary searches.
    entries: Vec<(EdgeDPartition, i8)>,
    consistent: bool,
    connected: bool,
    orbit_count: usize,
}

/// Why a table's determinant may not be the intended one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCaveat {
    pub consistent: bool,
    pub connected: bool,
}

impl SignTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[(EdgeDPartition, i8)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// No involution edge joined two partitions of equal sign.
    pub fn consistent(&self) -> bool {
        self.consistent
    }

    /// The orbit of the twin-star partition is the whole enumeration.
    pub fn connected(&self) -> bool {
        self.connected
    }

    /// Connected components of the involution graph.
    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn caveat(&self) -> Option<TableCaveat> {
        (!self.consistent || !self.connected).then_some(TableCaveat {
            consistent: self.consistent,
            connected: self.connected,
        })
    }

    pub fn position(&self, p: &EdgeDPartition) -> Option<usize> {
        if p.d() != self.d {
            return None;
        }
        self.entries.binary_search_by(|(q, _)| q.cmp(p)).ok()
    }

    /// `epsilon(p)`.
    pub fn epsilon(&self, p: &EdgeDPartition) -> Result<i8> {
        self.position(p)
            .map(|k| self.entries[k].1)
            .ok_or(Error::UnknownPartition)
    }
}

/// Free-function form of [`SignTable::epsilon`].
pub fn epsilon(table: &SignTable, p: &EdgeDPartition) -> Result<i8> {
    table.epsilon(p)
}

/// Enumerates `P^{h,cf}_d(K_{2d})` and signs it by BFS from the twin-star
/// partition.
pub fn build_sign_table(d: usize, config: &EnumConfig) -> Result<SignTable> {
    let parts = enumerate_partitions(d, EnumMode::HomogeneousCycleFree, config)?;
    sign_partitions(d, parts)
}

/// Signs an explicit involution-closed family of partitions of width `d`.
///
/// Fails if the family is not closed under involutions or a partition is not
/// homogeneous cycle-free.
pub fn sign_partitions(d: usize, mut parts: Vec<EdgeDPartition>) -> Result<SignTable> {
    if d == 0 {
        return Err(Error::InvalidWidth(d));
    }
    if parts
        .iter()
        .any(|p| p.d() != d || !p.is_homogeneous_cycle_free())
    {
        return Err(Error::NotHomogeneousCycleFree);
    }
    parts.sort();
    parts.dedup();
    let find = |q: &EdgeDPartition| parts.binary_search(q).ok();

    let tris: Vec<_> = triangles(d).collect();
    let mut signs: Vec<i8> = vec![0; parts.len()];
    let mut consistent = true;
    let mut orbit_count = 0;
    let mut queue = VecDeque::new();

    let seed = find(&partition_of_e(d)).ok_or(Error::UnknownPartition)?;
    let mut next_seed = Some((seed, seed_sign(d)));
    let mut scan = 0;
    while let Some((start, s)) = next_seed.take() {
        orbit_count += 1;
        signs[start] = s;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(x, y, z) in &tris {
                let q = involution_trusted(&parts[u], x, y, z)?;
                let v = find(&q).ok_or(Error::UnknownPartition)?;
                let want = -signs[u];
                if signs[v] == 0 {
                    signs[v] = want;
                    queue.push_back(v);
                } else if signs[v] != want {
                    consistent = false;
                }
            }
        }
        // unreached orbits get +1; their relative sign is not determined
        while scan < parts.len() && signs[scan] != 0 {
            scan += 1;
        }
        if scan < parts.len() {
            next_seed = Some((scan, 1));
        }
    }

    Ok(SignTable {
        d,
        entries: parts.into_iter().zip(signs).collect(),
        consistent,
        connected: orbit_count == 1,
        orbit_count,
    })
}

/// Outcome of a bounded walk of the involution graph, for widths where the
/// full table cannot be built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitExploration {
    pub d: usize,
    /// Partitions signed so far.
    pub visited: usize,
    /// Involution edges examined, including edges to unsigned partitions.
    pub edges_checked: usize,
    /// Edges joining two partitions of equal sign.
    pub conflicts: usize,
    /// The whole orbit fit within the limit.
    pub exhausted: bool,
}

/// Breadth-first sign propagation from the twin-star partition, stopping after
/// `max_visited` partitions. Conflicts among the explored part would already
/// refute a consistent sign map.
pub fn explore_sign_orbit(d: usize, max_visited: usize) -> Result<OrbitExploration> {
    let tris: Vec<_> = triangles(d).collect();
    let start = partition_of_e(d);
    let mut signs: HashMap<EdgeDPartition, i8> = HashMap::new();
    let mut queue = VecDeque::new();
    signs.insert(start.clone(), seed_sign(d));
    queue.push_back(start);
    let (mut edges_checked, mut conflicts) = (0, 0);
    let mut truncated = false;
    while let Some(p) = queue.pop_front() {
        let s = signs[&p];
        for &(x, y, z) in &tris {
            let q = involution_trusted(&p, x, y, z)?;
            edges_checked += 1;
            match signs.get(&q) {
                Some(&t) if t != -s => conflicts += 1,
                Some(_) => {}
                None if signs.len() < max_visited => {
                    signs.insert(q.clone(), -s);
                    queue.push_back(q);
                }
                None => truncated = true,
            }
        }
    }
    Ok(OrbitExploration {
        d,
        visited: signs.len(),
        edges_checked,
        conflicts,
        exhausted: !truncated,
    })
}

// ---- JSON ----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntryJson {
    colors: Vec<u8>,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    d: usize,
    entries: Vec<EntryJson>,
    consistent: bool,
    connected: bool,
    #[serde(default)]
    orbit_count: Option<usize>,
}

impl Serialize for SignTable {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TableJson {
            d: self.d,
            entries: self
                .entries
                .iter()
                .map(|(p, s)| EntryJson {
                    colors: p.colors().to_vec(),
                    sign: *s,
                })
                .collect(),
            consistent: self.consistent,
            connected: self.connected,
            orbit_count: Some(self.orbit_count),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignTable {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableJson::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for e in raw.entries {
            if e.sign != 1 && e.sign != -1 {
                return Err(D::Error::custom(format!(
                    "sign must be 1 or -1, got {}",
                    e.sign
                )));
            }
            let p = EdgeDPartition::new(raw.d, e.colors).map_err(D::Error::custom)?;
            if !p.is_homogeneous_cycle_free() {
                return Err(D::Error::custom(
                    "table entry is not homogeneous cycle-free",
                ));
            }
            entries.push((p, e.sign));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(D::Error::custom("duplicate partition in sign table"));
        }
        Ok(SignTable {
            d: raw.d,
            entries,
            consistent: raw.consistent,
            connected: raw.connected,
            orbit_count: raw.orbit_count.unwrap_or(1),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::involution;

    fn table(d: usize) -> SignTable {
        build_sign_table(d, &EnumConfig::default()).unwrap()
    }

    #[test]
    fn d1_is_trivial() {
        let t = table(1);
        assert_eq!(t.len(), 1);
        assert_eq!(t.epsilon(&partition_of_e(1)), Ok(1));
        assert!(t.consistent() && t.connected());
    }

    #[test]
    fn d2_table() {
        let t = table(2);
        assert_eq!(t.len(), 12);
        assert!(t.consistent());
        assert!(t.connected());
        assert_eq!(t.orbit_count(), 1);
        assert_eq!(t.caveat(), None);
        assert_eq!(epsilon(&t, &partition_of_e(2)), Ok(-1));
        let q = involution(&partition_of_e(2), 1, 2, 3).unwrap();
        assert_eq!(t.epsilon(&q), Ok(1));
        // six of each sign
        assert_eq!(t.entries().iter().filter(|e| e.1 == 1).count(), 6);
    }

    #[test]
    fn d2_sign_flips_on_every_involution() {
        let t = table(2);
        for (p, s) in t.entries() {
            for (x, y, z) in triangles(2) {
                let q = involution(p, x, y, z).unwrap();
                assert_eq!(t.epsilon(&q).unwrap(), -s);
            }
        }
    }

    #[test]
    fn unknown_partition_lookup() {
        let t = table(2);
        let cyclic = EdgeDPartition::new(2, vec![1, 2, 2, 1, 1, 2]).unwrap();
        assert_eq!(t.epsilon(&cyclic), Err(Error::UnknownPartition));
        assert_eq!(t.epsilon(&partition_of_e(3)), Err(Error::UnknownPartition));
    }

    #[test]
    fn non_closed_family_is_rejected() {
        let p = partition_of_e(2);
        assert_eq!(sign_partitions(2, vec![p]), Err(Error::UnknownPartition));
    }

    #[test]
    fn json_round_trip() {
        let t = table(2);
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"d":2,"entries":[{"colors":[1,1,2,2,1,2],"sign":-1}"#));
        assert!(s.ends_with(r#""consistent":true,"connected":true,"orbit_count":1}"#));
        let back: SignTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"d":2,"entries":[{"colors":[1,2,2,1,1,2],"sign":1}],"consistent":true,"connected":true}"#;
        assert!(serde_json::from_str::<SignTable>(bad).is_err());
    }

    #[test]
    fn bounded_exploration_d3_covers_whole_orbit() {
        let full = explore_sign_orbit(3, usize::MAX).unwrap();
        assert!(full.exhausted);
        assert_eq!(full.conflicts, 0);
        assert_eq!(full.visited, 66240);
        let partial = explore_sign_orbit(3, 100).unwrap();
        assert!(!partial.exhausted);
        assert_eq!(partial.visited, 100);
    }
}
