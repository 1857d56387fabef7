use num_rational::Ratio;

use super::{Edge, Topology, TopologyError};
use crate::scalar::Scalar;

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<u64>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return;
        }
        let (big, small) = if self.size[rx] >= self.size[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }
}

impl Topology {
    /// Ordered pairs `(x, y)`, `x != y`, joined by alive edges, skipping edge
    /// index `skip` if given.
    fn reachable_pairs(&self, skip: Option<usize>) -> u64 {
        let mut uf = UnionFind::new(self.nodes.len());
        for (ei, e) in self.edges.iter().enumerate() {
            if self.alive[ei] && Some(ei) != skip {
                uf.union(self.node_index[&e.a], self.node_index[&e.b]);
            }
        }
        let roots: Vec<usize> = (0..self.nodes.len()).filter(|&i| uf.find(i) == i).collect();
        roots.iter().map(|&r| uf.size[r] * (uf.size[r] - 1)).sum()
    }

    /// Number of ordered node pairs that lose reachability when `e` is severed.
    pub fn edge_criticality(&self, e: Edge) -> Result<u64, TopologyError> {
        let ei = self.edge_idx(e)?;
        Ok(self.reachable_pairs(None) - self.reachable_pairs(Some(ei)))
    }

    /// Reachable ordered pairs over all ordered pairs, as an exact ratio.
    pub fn connectivity_ratio(&self) -> Result<Ratio<u64>, TopologyError> {
        let n = self.nodes.len() as u64;
        if n < 2 {
            return Err(TopologyError::TooFewNodes(self.nodes.len()));
        }
        Ok(Ratio::new_raw(self.reachable_pairs(None), n * (n - 1)))
    }

    /// Fraction of ordered node pairs that can reach each other.
    pub fn connectivity<S: Scalar>(&self) -> Result<S, TopologyError> {
        self.connectivity_ratio().map(S::from_ratio)
    }
}
