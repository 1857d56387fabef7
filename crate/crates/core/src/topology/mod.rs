//! Leveled nodal graph: node ids, severable undirected links, routes and
//! reachability analysis.
//!
//! Nodes live on one of four levels (nation, upper, lower, outer). Links are
//! undirected and identified by their canonical endpoint pair; each link
//! carries an `alive` flag that attacks toggle. All route searches are
//! minimum-hop over alive links with a deterministic tie-break on node id
//! order, so equal inputs always produce identical hop lists.

mod analysis;
mod generate;
mod routing;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use generate::{build_figure1, generate_topology, LevelCounts};
pub use routing::Trace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(Edge),
    #[error("self-loop on {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("topology needs at least 2 nodes, has {0}")]
    TooFewNodes(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("{0} count must be at least 1")]
    ZeroCount(&'static str),
    #[error("redundancy factor {0} outside [0, 1]")]
    RedundancyOutOfRange(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Hierarchy level of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    /// Nation backbone.
    N,
    /// Upper aggregation.
    U,
    /// Lower aggregation.
    L,
    /// Outer end-user systems.
    O,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::N, Level::U, Level::L, Level::O];

    pub fn letter(self) -> char {
        match self {
            Level::N => 'N',
            Level::U => 'U',
            Level::L => 'L',
            Level::O => 'O',
        }
    }

    pub fn from_letter(c: char) -> Option<Level> {
        match c {
            'N' => Some(Level::N),
            'U' => Some(Level::U),
            'L' => Some(Level::L),
            'O' => Some(Level::O),
            _ => None,
        }
    }
}

/// Level letter plus a 1-based index, rendered as e.g. `N1` or `O4`.
///
/// Ordering compares the level letter first and then the numeric index, so
/// `N2 < N10` and `L3 < N1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId {
    level: Level,
    index: u32,
}

impl NodeId {
    pub fn new(level: Level, index: u32) -> Result<Self, TopologyError> {
        if index == 0 {
            return Err(TopologyError::Parse(format!(
                "node index must be >= 1 (got {}0)",
                level.letter()
            )));
        }
        Ok(Self { level, index })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

/// Shorthand for literals in tests and fixtures. Panics on a malformed id.
pub fn node(s: &str) -> NodeId {
    s.parse().unwrap_or_else(|e| panic!("bad node literal {s:?}: {e}"))
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.level.letter(), self.index).cmp(&(other.level.letter(), other.index))
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.level.letter(), self.index)
    }
}

impl FromStr for NodeId {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let level = chars
            .next()
            .and_then(Level::from_letter)
            .ok_or_else(|| TopologyError::Parse(format!("bad node level in {s:?}")))?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(TopologyError::Parse(format!("bad node index in {s:?}")));
        }
        let index = digits
            .parse::<u32>()
            .map_err(|e| TopologyError::Parse(format!("{s:?}: {e}")))?;
        NodeId::new(level, index)
    }
}

/// Undirected link identity, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: NodeId,
    b: NodeId,
}

impl Edge {
    pub fn new(x: NodeId, y: NodeId) -> Result<Self, TopologyError> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Self { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(Self { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(TopologyError::SelfLoop(x)),
        }
    }

    pub fn a(&self) -> NodeId {
        self.a
    }

    pub fn b(&self) -> NodeId {
        self.b
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }
}

/// Shorthand for `"N1-N2"` style literals. Panics on a malformed edge.
pub fn edge(s: &str) -> Edge {
    s.parse().unwrap_or_else(|e| panic!("bad edge literal {s:?}: {e}"))
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl FromStr for Edge {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| TopologyError::Parse(format!("edge {s:?} is not of the form A-B")))?;
        Edge::new(x.parse()?, y.parse()?)
    }
}

/// Simple route of at least two distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    hops: Vec<NodeId>,
}

impl Path {
    pub fn new(hops: Vec<NodeId>) -> Result<Self, TopologyError> {
        if hops.len() < 2 {
            return Err(TopologyError::InvalidPath(format!(
                "needs at least 2 hops, got {}",
                hops.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for h in &hops {
            if !seen.insert(*h) {
                return Err(TopologyError::InvalidPath(format!("node {h} repeats")));
            }
        }
        Ok(Self { hops })
    }

    pub fn hops(&self) -> &[NodeId] {
        &self.hops
    }

    pub fn src(&self) -> NodeId {
        self.hops[0]
    }

    pub fn dst(&self) -> NodeId {
        self.hops[self.hops.len() - 1]
    }

    /// Number of links traversed.
    pub fn hop_count(&self) -> usize {
        self.hops.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.hops
            .windows(2)
            .map(|w| Edge::new(w[0], w[1]).expect("simple path has no self-loops"))
    }

    pub fn shares_edge_with(&self, other: &Path) -> bool {
        let mine: BTreeSet<Edge> = self.edges().collect();
        other.edges().any(|e| mine.contains(&e))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hops.iter().enumerate() {
            if i > 0 {
                f.write_str("->")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Undirected graph of leveled nodes with per-link alive flags.
#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<NodeId>,
    node_index: BTreeMap<NodeId, usize>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<Edge, usize>,
    alive: Vec<bool>,
    // (neighbor index, edge index), sorted by neighbor index.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges && self.alive == other.alive
    }
}

impl Eq for Topology {}

impl Topology {
    /// Builds a topology with every edge alive.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, TopologyError> {
        let mut node_set = BTreeSet::new();
        for n in nodes {
            if !node_set.insert(n) {
                return Err(TopologyError::DuplicateNode(n));
            }
        }
        let mut edge_set = BTreeSet::new();
        for e in edges {
            for end in [e.a, e.b] {
                if !node_set.contains(&end) {
                    return Err(TopologyError::UnknownNode(end));
                }
            }
            if !edge_set.insert(e) {
                return Err(TopologyError::DuplicateEdge(e));
            }
        }

        let nodes: Vec<NodeId> = node_set.into_iter().collect();
        let node_index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let edges: Vec<Edge> = edge_set.into_iter().collect();
        let edge_index: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (ei, e) in edges.iter().enumerate() {
            let (x, y) = (node_index[&e.a], node_index[&e.b]);
            adjacency[x].push((y, ei));
            adjacency[y].push((x, ei));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let alive = vec![true; edges.len()];
        Ok(Self {
            nodes,
            node_index,
            edges,
            edge_index,
            alive,
            adjacency,
        })
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Canonical edges in ascending order, alive or not.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.node_index.contains_key(&n)
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edge_index.contains_key(&e)
    }

    pub fn nodes_at(&self, level: Level) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied().filter(move |n| n.level == level)
    }

    pub fn is_alive(&self, e: Edge) -> Result<bool, TopologyError> {
        Ok(self.alive[self.edge_idx(e)?])
    }

    pub fn alive_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().zip(&self.alive).filter(|(_, a)| **a).map(|(e, _)| *e)
    }

    /// Marks `e` dead. Severing a dead edge is a no-op.
    pub fn sever_edge(&mut self, e: Edge) -> Result<(), TopologyError> {
        let i = self.edge_idx(e)?;
        self.alive[i] = false;
        Ok(())
    }

    /// Marks `e` alive again. Restoring a live edge is a no-op.
    pub fn restore_edge(&mut self, e: Edge) -> Result<(), TopologyError> {
        let i = self.edge_idx(e)?;
        self.alive[i] = true;
        Ok(())
    }

    /// Copy of `self` with `e` severed.
    pub fn severed(&self, e: Edge) -> Result<Topology, TopologyError> {
        let mut t = self.clone();
        t.sever_edge(e)?;
        Ok(t)
    }

    /// Copy of `self` with `e` restored.
    pub fn restored(&self, e: Edge) -> Result<Topology, TopologyError> {
        let mut t = self.clone();
        t.restore_edge(e)?;
        Ok(t)
    }

    /// Copy with every edge alive.
    pub fn pristine(&self) -> Topology {
        let mut t = self.clone();
        t.alive.iter_mut().for_each(|a| *a = true);
        t
    }

    pub(crate) fn node_idx(&self, n: NodeId) -> Result<usize, TopologyError> {
        self.node_index.get(&n).copied().ok_or(TopologyError::UnknownNode(n))
    }

    pub(crate) fn edge_idx(&self, e: Edge) -> Result<usize, TopologyError> {
        self.edge_index.get(&e).copied().ok_or(TopologyError::UnknownEdge(e))
    }

    /// Checks that `p` only uses known nodes joined by alive edges.
    pub fn validate_path(&self, p: &Path) -> Result<(), TopologyError> {
        for h in p.hops() {
            self.node_idx(*h)?;
        }
        for e in p.edges() {
            let i = self
                .edge_index
                .get(&e)
                .ok_or_else(|| TopologyError::InvalidPath(format!("no link {e}")))?;
            if !self.alive[*i] {
                return Err(TopologyError::InvalidPath(format!("link {e} is severed")));
            }
        }
        Ok(())
    }
}
