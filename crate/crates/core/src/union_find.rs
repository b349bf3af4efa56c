//! Union-find with rollback, for incremental acyclicity checks while
//! backtracking.

/// Disjoint sets over `0..n` with union by size and no path compression, so
/// every union can be undone in LIFO order.
#[derive(Debug, Clone)]
pub struct RollbackUnionFind {
    parent: Vec<u8>,
    size: Vec<u8>,
    /// Roots that were attached below another root, newest last.
    history: Vec<u8>,
}

impl RollbackUnionFind {
    pub fn new(n: usize) -> Self {
        assert!(n <= u8::MAX as usize);
        Self {
            parent: (0..n as u8).collect(),
            size: vec![1; n],
            history: Vec::with_capacity(n),
        }
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    /// Merges the sets of `a` and `b`. Returns `false` (and records nothing)
    /// when they were already connected, i.e. the edge would close a cycle.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u8;
        self.size[ra] += self.size[rb];
        self.history.push(rb as u8);
        true
    }

    /// Undoes the most recent successful `union`.
    pub fn rollback(&mut self) {
        let child = self.history.pop().expect("rollback without union") as usize;
        let root = self.parent[child] as usize;
        self.size[root] -= self.size[child];
        self.parent[child] = child as u8;
    }

    /// Number of successful unions currently applied.
    #[cfg(test)]
    pub fn merges(&self) -> usize {
        self.history.len()
    }
}
