use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Level, NodeId, Topology, TopologyError};

/// Node count per level for [`generate_topology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LevelCounts {
    pub n: u32,
    pub u: u32,
    pub l: u32,
    pub o: u32,
}

impl LevelCounts {
    pub fn new(n: u32, u: u32, l: u32, o: u32) -> Self {
        Self { n, u, l, o }
    }

    pub fn get(&self, level: Level) -> u32 {
        match level {
            Level::N => self.n,
            Level::U => self.u,
            Level::L => self.l,
            Level::O => self.o,
        }
    }
}

fn id(level: Level, index: u32) -> NodeId {
    NodeId::new(level, index).expect("generated indices start at 1")
}

fn link(x: NodeId, y: NodeId) -> Edge {
    Edge::new(x, y).expect("generated links join distinct nodes")
}

/// The reference nodal framework.
///
/// Without redundancy this is the nine node chain
/// `O1-L1-U2-U1-N1-N2-U3-L3-O4`. With redundancy, `N3` and `N4` add a second
/// backbone route `U1-N3-N4-U3` alongside `N1-N2`.
pub fn build_figure1(redundant: bool) -> Topology {
    let chain = ["O1", "L1", "U2", "U1", "N1", "N2", "U3", "L3", "O4"];
    let mut nodes: Vec<NodeId> = chain.iter().map(|s| s.parse().expect("literal")).collect();
    let mut edges: Vec<Edge> = nodes.windows(2).map(|w| link(w[0], w[1])).collect();
    if redundant {
        let (n3, n4) = (id(Level::N, 3), id(Level::N, 4));
        let (u1, u3) = (id(Level::U, 1), id(Level::U, 3));
        nodes.extend([n3, n4]);
        edges.extend([link(u1, n3), link(n3, n4), link(n4, u3)]);
    }
    Topology::new(nodes, edges).expect("reference topology is well formed")
}

/// Deterministic leveled topology.
///
/// Every outer node `Oi` attaches to `L((i mod l)+1)`, likewise lower to upper
/// and upper to nation. Nation nodes form a ring (a single link for two nodes).
/// `redundancy_factor` is the probability that each remaining child/parent
/// pair between adjacent levels, and each remaining nation pair, gets an
/// extra link. The result is always connected.
pub fn generate_topology(counts: LevelCounts, redundancy_factor: f64, seed: u64) -> Result<Topology, TopologyError> {
    for (level, name) in [(Level::N, "N"), (Level::U, "U"), (Level::L, "L"), (Level::O, "O")] {
        if counts.get(level) == 0 {
            return Err(TopologyError::ZeroCount(name));
        }
    }
    if !(0.0..=1.0).contains(&redundancy_factor) {
        return Err(TopologyError::RedundancyOutOfRange(redundancy_factor));
    }

    let mut nodes = Vec::new();
    for level in Level::ALL {
        nodes.extend((1..=counts.get(level)).map(|i| id(level, i)));
    }

    let mut edges = std::collections::BTreeSet::new();
    for (child, parent) in [(Level::O, Level::L), (Level::L, Level::U), (Level::U, Level::N)] {
        let parents = counts.get(parent);
        for i in 1..=counts.get(child) {
            edges.insert(link(id(child, i), id(parent, (i % parents) + 1)));
        }
    }
    let n = counts.n;
    if n == 2 {
        edges.insert(link(id(Level::N, 1), id(Level::N, 2)));
    } else if n >= 3 {
        for i in 1..=n {
            edges.insert(link(id(Level::N, i), id(Level::N, i % n + 1)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (child, parent) in [(Level::O, Level::L), (Level::L, Level::U), (Level::U, Level::N)] {
        for i in 1..=counts.get(child) {
            for j in 1..=counts.get(parent) {
                let e = link(id(child, i), id(parent, j));
                if !edges.contains(&e) && rng.gen_bool(redundancy_factor) {
                    edges.insert(e);
                }
            }
        }
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let e = link(id(Level::N, i), id(Level::N, j));
            if !edges.contains(&e) && rng.gen_bool(redundancy_factor) {
                edges.insert(e);
            }
        }
    }

    Topology::new(nodes, edges)
}
