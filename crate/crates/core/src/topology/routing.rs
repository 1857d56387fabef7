use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::{Edge, NodeId, Path, Topology, TopologyError};

/// Per-hop trace of a route in transmission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub hops: Vec<(NodeId, usize)>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, _)) in self.hops.iter().enumerate() {
            if i > 0 {
                f.write_str("->")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl Topology {
    /// Minimum-hop route over alive edges, or `None` when `dst` is unreachable.
    ///
    /// Among equal-length routes the one whose hop sequence is smallest in
    /// node id order wins.
    pub fn shortest_path(&self, src: NodeId, dst: NodeId) -> Result<Option<Path>, TopologyError> {
        self.route_avoiding(src, dst, |_| false)
    }

    /// Minimum-hop route that shares no edge with `forbidden`.
    pub fn disjoint_path(
        &self,
        src: NodeId,
        dst: NodeId,
        forbidden: &BTreeSet<Edge>,
    ) -> Result<Option<Path>, TopologyError> {
        let mut mask = vec![false; self.edges.len()];
        for e in forbidden {
            // Edges outside the topology cannot be used anyway.
            if let Some(&i) = self.edge_index.get(e) {
                mask[i] = true;
            }
        }
        self.route_avoiding(src, dst, |ei| mask[ei])
    }

    /// Route that avoids every edge of `primary`.
    pub fn parallel_path(&self, primary: &Path) -> Result<Option<Path>, TopologyError> {
        let forbidden: BTreeSet<Edge> = primary.edges().collect();
        self.disjoint_path(primary.src(), primary.dst(), &forbidden)
    }

    fn route_avoiding(
        &self,
        src: NodeId,
        dst: NodeId,
        forbidden: impl Fn(usize) -> bool,
    ) -> Result<Option<Path>, TopologyError> {
        let s = self.node_idx(src)?;
        let d = self.node_idx(dst)?;
        if s == d {
            return Err(TopologyError::SameEndpoints(src));
        }
        let usable = |ei: usize| self.alive[ei] && !forbidden(ei);

        // Distances to `dst`, then a greedy walk from `src` taking the
        // smallest neighbor that is one step closer. Adjacency lists are
        // sorted by neighbor id, which yields the lexicographically smallest
        // shortest route.
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[d] = 0;
        let mut queue = VecDeque::from([d]);
        while let Some(u) = queue.pop_front() {
            if u == s {
                break;
            }
            for &(v, ei) in &self.adjacency[u] {
                if dist[v] == usize::MAX && usable(ei) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[s] == usize::MAX {
            return Ok(None);
        }

        let mut hops = Vec::with_capacity(dist[s] + 1);
        let mut cur = s;
        hops.push(self.nodes[cur]);
        while cur != d {
            let next = self.adjacency[cur]
                .iter()
                .find(|&&(v, ei)| dist[v] != usize::MAX && dist[v] + 1 == dist[cur] && usable(ei))
                .map(|&(v, _)| v)
                .expect("BFS distance guarantees a predecessor");
            hops.push(self.nodes[next]);
            cur = next;
        }
        Path::new(hops).map(Some)
    }

    /// Per-hop trace of `p`; fails when any hop is no longer joined by an alive edge.
    pub fn trace_route(&self, p: &Path) -> Result<Trace, TopologyError> {
        self.validate_path(p)?;
        Ok(Trace {
            hops: p.hops().iter().copied().enumerate().map(|(i, n)| (n, i)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_figure1, edge, node};
    use super::*;

    fn hops(p: &Path) -> Vec<String> {
        p.hops().iter().map(|n| n.to_string()).collect()
    }

    #[test]
    fn figure1_primary_route() {
        let t = build_figure1(false);
        let p = t.shortest_path(node("O1"), node("O4")).unwrap().unwrap();
        assert_eq!(p.to_string(), "O1->L1->U2->U1->N1->N2->U3->L3->O4");
        assert_eq!(p.hop_count(), 8);
    }

    #[test]
    fn adjacent_nodes() {
        let t = build_figure1(false);
        let p = t.shortest_path(node("O1"), node("L1")).unwrap().unwrap();
        assert_eq!(hops(&p), ["O1", "L1"]);
    }

    #[test]
    fn severed_e1_disconnects() {
        let t = build_figure1(false).severed(edge("N1-N2")).unwrap();
        assert_eq!(t.shortest_path(node("O1"), node("O4")).unwrap(), None);
    }

    #[test]
    fn unknown_node_is_not_unreachable() {
        let t = build_figure1(false);
        assert_eq!(
            t.shortest_path(node("O1"), node("O9")),
            Err(TopologyError::UnknownNode(node("O9")))
        );
        assert_eq!(
            t.shortest_path(node("O1"), node("O1")),
            Err(TopologyError::SameEndpoints(node("O1")))
        );
    }

    #[test]
    fn tie_break_prefers_smaller_ids() {
        let t = build_figure1(true);
        // U1->U3 has two 3-hop routes; the one through N1 sorts first.
        let p = t.shortest_path(node("U1"), node("U3")).unwrap().unwrap();
        assert_eq!(hops(&p), ["U1", "N1", "N2", "U3"]);
    }

    #[test]
    fn disjoint_on_chain_is_absent() {
        let t = build_figure1(false);
        let primary = t.shortest_path(node("O1"), node("O4")).unwrap().unwrap();
        let forbidden = primary.edges().collect();
        assert_eq!(t.disjoint_path(node("O1"), node("O4"), &forbidden).unwrap(), None);
    }

    #[test]
    fn disjoint_through_redundant_backbone() {
        let t = build_figure1(true);
        let forbidden = [edge("N1-U1"), edge("N1-N2"), edge("N2-U3")].into_iter().collect();
        let p = t.disjoint_path(node("U1"), node("U3"), &forbidden).unwrap().unwrap();
        assert_eq!(hops(&p), ["U1", "N3", "N4", "U3"]);
    }

    #[test]
    fn empty_forbidden_matches_shortest() {
        for redundant in [false, true] {
            let t = build_figure1(redundant);
            for &s in t.nodes() {
                for &d in t.nodes() {
                    if s != d {
                        assert_eq!(
                            t.disjoint_path(s, d, &BTreeSet::new()).unwrap(),
                            t.shortest_path(s, d).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_rendering_and_errors() {
        let t = build_figure1(false);
        let p = t.shortest_path(node("O1"), node("O4")).unwrap().unwrap();
        let tr = t.trace_route(&p).unwrap();
        assert_eq!(tr.to_string(), "O1->L1->U2->U1->N1->N2->U3->L3->O4");
        assert_eq!(tr.hops[8], (node("O4"), 8));

        let short = Path::new(vec![node("O1"), node("L1")]).unwrap();
        assert_eq!(
            t.trace_route(&short).unwrap().hops,
            vec![(node("O1"), 0), (node("L1"), 1)]
        );

        let cut = t.severed(edge("U1-U2")).unwrap();
        assert!(matches!(cut.trace_route(&p), Err(TopologyError::InvalidPath(_))));
    }
}
