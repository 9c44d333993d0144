use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::{Graph, NodeId};
use crate::cost::Cost;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub graph: Graph,
    pub starts: Vec<NodeId>,
    pub goals: Vec<NodeId>,
    /// Cost paid by a supporting robot, reassigned to the receiver.
    pub supporter_cost: Cost,
    /// Time bound; only the brute-force oracle uses it.
    pub horizon: Option<usize>,
}

impl ProblemInstance {
    pub fn new(graph: Graph, starts: Vec<NodeId>, goals: Vec<NodeId>, supporter_cost: Cost) -> Self {
        ProblemInstance { graph, starts, goals, supporter_cost, horizon: None }
    }

    pub fn with_horizon(mut self, horizon: Option<usize>) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn robot_count(&self) -> usize {
        self.starts.len()
    }

    /// Receiver-side cost of a supported crossing: reduced cost plus the
    /// reassigned supporter cost. `None` for non-risky edges.
    pub fn supported_cost(&self, edge: usize) -> Option<Cost> {
        self.graph.risky_of(edge).map(|r| r.reduced_cost + self.supporter_cost)
    }

    /// Base cost minus supported cost. May be zero or negative, in which
    /// case support never pays off on that edge.
    pub fn coordination_gain(&self, edge: usize) -> Option<Cost> {
        self.supported_cost(edge).map(|s| self.graph.edge(edge).cost - s)
    }

    /// Edge cost assuming support is always available when it helps.
    pub fn optimistic_cost(&self, edge: usize) -> Cost {
        let base = self.graph.edge(edge).cost;
        match self.supported_cost(edge) {
            Some(s) if s < base => s,
            _ => base,
        }
    }

    pub fn at_goal(&self, locations: &[NodeId]) -> bool {
        locations == self.goals.as_slice()
    }

    /// Copy of this instance with different start locations.
    pub fn with_starts(&self, starts: Vec<NodeId>) -> Self {
        ProblemInstance { starts, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityTier {
    Sparse,
    Moderate,
    Dense,
}

impl ConnectivityTier {
    pub const ALL: [ConnectivityTier; 3] =
        [ConnectivityTier::Sparse, ConnectivityTier::Moderate, ConnectivityTier::Dense];

    pub fn as_str(self) -> &'static str {
        match self {
            ConnectivityTier::Sparse => "sparse",
            ConnectivityTier::Moderate => "moderate",
            ConnectivityTier::Dense => "dense",
        }
    }
}

impl fmt::Display for ConnectivityTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConnectivityTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sparse" => Ok(ConnectivityTier::Sparse),
            "moderate" => Ok(ConnectivityTier::Moderate),
            "dense" => Ok(ConnectivityTier::Dense),
            other => Err(format!("unknown connectivity tier `{other}`")),
        }
    }
}

/// Summary of an instance along the benchmark axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub node_count: usize,
    pub edge_count: usize,
    pub risky_count: usize,
    pub support_pair_count: usize,
    pub robot_count: usize,
    pub connectivity_tier: ConnectivityTier,
    pub seed: u64,
}

impl InstanceDescriptor {
    pub fn describe(inst: &ProblemInstance, tier: ConnectivityTier, seed: u64) -> Self {
        InstanceDescriptor {
            node_count: inst.graph.node_count(),
            edge_count: inst.graph.edges().len(),
            risky_count: inst.graph.risky_edges().len(),
            support_pair_count: inst.graph.support_pair_count(),
            robot_count: inst.robot_count(),
            connectivity_tier: tier,
            seed,
        }
    }
}
