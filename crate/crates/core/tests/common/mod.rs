#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nodalsim::topology::{Edge, NodeId, Topology};

fn adjacency(t: &Topology, skip: Option<Edge>) -> BTreeMap<NodeId, Vec<NodeId>> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = t.nodes().iter().map(|&n| (n, Vec::new())).collect();
    for e in t.alive_edges().filter(|&e| Some(e) != skip) {
        adj.get_mut(&e.a()).unwrap().push(e.b());
        adj.get_mut(&e.b()).unwrap().push(e.a());
    }
    adj
}

/// Ordered reachable pairs by one BFS per source.
pub fn bfs_reachable_pairs(t: &Topology, skip: Option<Edge>) -> u64 {
    let adj = adjacency(t, skip);
    let mut total = 0;
    for &s in t.nodes() {
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        total += seen.len() as u64 - 1;
    }
    total
}

pub fn bfs_criticality(t: &Topology, e: Edge) -> u64 {
    bfs_reachable_pairs(t, None) - bfs_reachable_pairs(t, Some(e))
}

/// Every simple path from `src` to `dst`, by depth-first enumeration.
pub fn simple_paths(t: &Topology, src: NodeId, dst: NodeId) -> Vec<Vec<NodeId>> {
    fn go(adj: &BTreeMap<NodeId, Vec<NodeId>>, dst: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let last = *path.last().unwrap();
        if last == dst {
            out.push(path.clone());
            return;
        }
        for &y in &adj[&last] {
            if !path.contains(&y) {
                path.push(y);
                go(adj, dst, path, out);
                path.pop();
            }
        }
    }
    let adj = adjacency(t, None);
    let mut out = Vec::new();
    go(&adj, dst, &mut vec![src], &mut out);
    out
}
