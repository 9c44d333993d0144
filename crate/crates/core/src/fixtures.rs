//! Small hand-built instances used by tests, examples and the CLI docs.

use crate::cost::Cost;
use crate::model::{Edge, Graph, ProblemInstance, RiskyEdge};

/// Four nodes, one risky edge `e(1,2)` (cost 10, reduced 1, supported from
/// node 3), supporter cost 1. Robot 0 travels 0 -> 2, robot 1 stays on 3.
/// The best plan costs 3; going alone costs 11.
pub fn t1() -> ProblemInstance {
    let graph = Graph::new(
        4,
        vec![Edge::new(0, 1, Cost::new(1)), Edge::new(1, 2, Cost::new(10)), Edge::new(0, 3, Cost::new(2))],
        vec![RiskyEdge::new(1, 2, Cost::new(1), vec![3])],
    );
    ProblemInstance::new(graph, vec![0, 3], vec![2, 3], Cost::new(1))
}

/// Three nodes where both robots must cross the same risky edge `e(0,1)`
/// in opposite directions, each needing the other on support node 2.
/// The best plan uses the same support pair twice and costs 8; with a single
/// use the best is 14.
pub fn repeat_support() -> ProblemInstance {
    let graph = Graph::new(
        3,
        vec![Edge::new(0, 1, Cost::new(10)), Edge::new(1, 2, Cost::new(1))],
        vec![RiskyEdge::new(0, 1, Cost::new(1), vec![2])],
    );
    ProblemInstance::new(graph, vec![0, 1], vec![1, 0], Cost::new(1))
}

/// Path graph `0 - 1 - ... - (n-1)` with unit costs and no risky edges.
pub fn line(n: usize, starts: Vec<usize>, goals: Vec<usize>) -> ProblemInstance {
    let edges = (1..n).map(|i| Edge::new(i - 1, i, Cost::new(1))).collect();
    ProblemInstance::new(Graph::new(n, edges, vec![]), starts, goals, Cost::new(1))
}
