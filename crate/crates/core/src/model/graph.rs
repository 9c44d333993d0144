use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;

pub type NodeId = usize;

/// Unordered node pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeKey {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        if u <= v {
            EdgeKey { lo: u, hi: v }
        } else {
            EdgeKey { lo: v, hi: u }
        }
    }

    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }

    pub fn lo(self) -> NodeId {
        self.lo
    }

    pub fn hi(self) -> NodeId {
        self.hi
    }

    pub fn contains(self, node: NodeId) -> bool {
        self.lo == node || self.hi == node
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({},{})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub key: EdgeKey,
    pub cost: Cost,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, cost: Cost) -> Self {
        Edge { key: EdgeKey::new(u, v), cost }
    }
}

/// Cost reduction data attached to a risky edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskyEdge {
    pub key: EdgeKey,
    pub reduced_cost: Cost,
    /// Sorted, deduplicated.
    pub support_nodes: Vec<NodeId>,
}

impl RiskyEdge {
    pub fn new(u: NodeId, v: NodeId, reduced_cost: Cost, support_nodes: Vec<NodeId>) -> Self {
        let mut support_nodes = support_nodes;
        support_nodes.sort_unstable();
        support_nodes.dedup();
        RiskyEdge { key: EdgeKey::new(u, v), reduced_cost, support_nodes }
    }

    pub fn is_support_node(&self, node: NodeId) -> bool {
        self.support_nodes.binary_search(&node).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub node: NodeId,
    /// Index into [`Graph::edges`].
    pub edge: usize,
}

/// Undirected weighted graph with a designated subset of risky edges.
///
/// Construction never fails: malformed input (out-of-range endpoints,
/// duplicates, missing support nodes) is kept so that
/// [`validate_instance`](crate::model::validate_instance) can report it.
/// Out-of-range endpoints and self loops are left out of the adjacency lists.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    risky: Vec<RiskyEdge>,
    adjacency: Vec<Vec<Neighbor>>,
    edge_lookup: FxHashMap<EdgeKey, usize>,
    risky_by_edge: Vec<Option<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges && self.risky == other.risky
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(node_count: usize, edges: Vec<Edge>, risky: Vec<RiskyEdge>) -> Self {
        let mut edges = edges;
        edges.sort_by_key(|e| e.key);
        let mut risky = risky;
        risky.sort_by_key(|r| r.key);

        let mut adjacency = vec![Vec::new(); node_count];
        let mut edge_lookup = FxHashMap::default();
        for (idx, edge) in edges.iter().enumerate() {
            let (u, v) = edge.key.endpoints();
            if edge_lookup.contains_key(&edge.key) {
                continue;
            }
            edge_lookup.insert(edge.key, idx);
            if u == v || v >= node_count {
                continue;
            }
            adjacency[u].push(Neighbor { node: v, edge: idx });
            adjacency[v].push(Neighbor { node: u, edge: idx });
        }
        for list in &mut adjacency {
            list.sort_by_key(|n| n.node);
        }

        let mut risky_by_edge = vec![None; edges.len()];
        for (ridx, r) in risky.iter().enumerate() {
            if let Some(&eidx) = edge_lookup.get(&r.key) {
                risky_by_edge[eidx].get_or_insert(ridx);
            }
        }

        Graph { node_count, edges, risky, adjacency, edge_lookup, risky_by_edge }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn risky_edges(&self) -> &[RiskyEdge] {
        &self.risky
    }

    /// Neighbors of `node` in increasing id order.
    pub fn neighbors(&self, node: NodeId) -> &[Neighbor] {
        &self.adjacency[node]
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edge_lookup.get(&EdgeKey::new(u, v)).copied()
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn base_cost(&self, u: NodeId, v: NodeId) -> Option<Cost> {
        self.edge_index(u, v).map(|i| self.edges[i].cost)
    }

    /// Risky-edge data for the edge at `idx`, if that edge is risky.
    pub fn risky_of(&self, idx: usize) -> Option<&RiskyEdge> {
        self.risky_by_edge[idx].map(|r| &self.risky[r])
    }

    pub fn risky(&self, key: EdgeKey) -> Option<&RiskyEdge> {
        self.edge_lookup.get(&key).and_then(|&i| self.risky_of(i))
    }

    pub fn are_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.edge_index(u, v).is_some()
    }

    /// Number of (risky edge, support node) combinations.
    pub fn support_pair_count(&self) -> usize {
        self.risky.iter().map(|r| r.support_nodes.len()).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for n in &self.adjacency[u] {
                if !seen[n.node] {
                    seen[n.node] = true;
                    reached += 1;
                    queue.push_back(n.node);
                }
            }
        }
        reached == self.node_count
    }
}
