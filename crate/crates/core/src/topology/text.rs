//! Plain-text adjacency format:
//!
//! ```text
//! nodes: L1,L3,N1,N2,O1,O4,U1,U2,U3
//! L1-O1
//! L1-U2
//! ```
//!
//! Only structure is stored; every parsed edge starts alive.

use super::{Edge, NodeId, Topology, TopologyError};

impl Topology {
    pub fn to_text(&self) -> String {
        let mut out = String::from("nodes: ");
        let names: Vec<String> = self.nodes.iter().map(NodeId::to_string).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for e in &self.edges {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Topology, TopologyError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TopologyError::Parse("empty topology text".into()))?;
        let list = header
            .strip_prefix("nodes:")
            .ok_or_else(|| TopologyError::Parse(format!("expected 'nodes:' header, got {header:?}")))?;
        let nodes = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<NodeId>, _>>()?;
        let edges = lines.map(str::parse).collect::<Result<Vec<Edge>, _>>()?;
        Topology::new(nodes, edges)
    }
}
