use std::collections::HashSet;
use std::fmt;

use super::graph::EdgeKey;
use super::instance::ProblemInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    NoNodes,
    EndpointOutOfRange,
    SelfLoop,
    DuplicateEdge,
    NegativeCost,
    RiskyEdgeNotInGraph,
    DuplicateRiskyEdge,
    MissingSupportNode,
    SupportNodeOutOfRange,
    ReducedCostExceedsBase,
    Disconnected,
    NoRobots,
    RobotCountMismatch,
    NodeOutOfRange,
    ZeroHorizon,
}

impl Rule {
    pub fn message(&self) -> &'static str {
        match self {
            Rule::NoNodes => "graph has no nodes",
            Rule::EndpointOutOfRange => "edge endpoint out of range",
            Rule::SelfLoop => "self-loop edge",
            Rule::DuplicateEdge => "duplicate edge",
            Rule::NegativeCost => "negative cost",
            Rule::RiskyEdgeNotInGraph => "risky edge is not an edge of the graph",
            Rule::DuplicateRiskyEdge => "risky edge listed twice",
            Rule::MissingSupportNode => "risky edge lacks support node",
            Rule::SupportNodeOutOfRange => "support node out of range",
            Rule::ReducedCostExceedsBase => "reduced cost exceeds base cost",
            Rule::Disconnected => "graph is not connected",
            Rule::NoRobots => "no robots",
            Rule::RobotCountMismatch => "starts and goals differ in length",
            Rule::NodeOutOfRange => "node id out of range",
            Rule::ZeroHorizon => "horizon must be positive",
        }
    }
}

/// One broken instance invariant: where, and which rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: Rule,
}

impl Violation {
    fn new(field: impl Into<String>, rule: Rule) -> Self {
        Violation { field: field.into(), rule }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule.message())
    }
}

/// Checks every structural invariant of an instance. An empty result means
/// the instance is safe to hand to any solver.
pub fn validate_instance(inst: &ProblemInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let g = &inst.graph;
    let n = g.node_count();
    if n == 0 {
        out.push(Violation::new("nodes", Rule::NoNodes));
    }

    let mut seen = HashSet::new();
    let mut endpoints_ok = true;
    for edge in g.edges() {
        let (u, v) = edge.key.endpoints();
        let field = format!("edges[{u},{v}]");
        if v >= n {
            out.push(Violation::new(field.clone(), Rule::EndpointOutOfRange));
            endpoints_ok = false;
        }
        if u == v {
            out.push(Violation::new(field.clone(), Rule::SelfLoop));
        }
        if !seen.insert(edge.key) {
            out.push(Violation::new(field.clone(), Rule::DuplicateEdge));
        }
        if edge.cost.is_negative() {
            out.push(Violation::new(field, Rule::NegativeCost));
        }
    }

    let mut risky_seen: HashSet<EdgeKey> = HashSet::new();
    for r in g.risky_edges() {
        let (u, v) = r.key.endpoints();
        let field = format!("risky[{u},{v}]");
        if !risky_seen.insert(r.key) {
            out.push(Violation::new(field.clone(), Rule::DuplicateRiskyEdge));
        }
        match g.edge_index(u, v) {
            None => out.push(Violation::new(field.clone(), Rule::RiskyEdgeNotInGraph)),
            Some(idx) => {
                if r.reduced_cost > g.edge(idx).cost {
                    out.push(Violation::new(field.clone(), Rule::ReducedCostExceedsBase));
                }
            }
        }
        if r.reduced_cost.is_negative() {
            out.push(Violation::new(field.clone(), Rule::NegativeCost));
        }
        if r.support_nodes.is_empty() {
            out.push(Violation::new(field.clone(), Rule::MissingSupportNode));
        }
        if r.support_nodes.iter().any(|&s| s >= n) {
            out.push(Violation::new(field, Rule::SupportNodeOutOfRange));
        }
    }

    if n > 0 && endpoints_ok && !g.is_connected() {
        out.push(Violation::new("edges", Rule::Disconnected));
    }

    if inst.starts.is_empty() {
        out.push(Violation::new("starts", Rule::NoRobots));
    }
    if inst.starts.len() != inst.goals.len() {
        out.push(Violation::new("goals", Rule::RobotCountMismatch));
    }
    for (name, list) in [("starts", &inst.starts), ("goals", &inst.goals)] {
        for (i, &node) in list.iter().enumerate() {
            if node >= n {
                out.push(Violation::new(format!("{name}[{i}]"), Rule::NodeOutOfRange));
            }
        }
    }
    if inst.supporter_cost.is_negative() {
        out.push(Violation::new("supporter_cost", Rule::NegativeCost));
    }
    if inst.horizon == Some(0) {
        out.push(Violation::new("horizon", Rule::ZeroHorizon));
    }
    out
}
