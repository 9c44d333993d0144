//! Single-robot shortest paths.
//!
//! Two edge-cost views are used throughout: the pessimistic view charges
//! every edge its base cost, the optimistic view charges each risky edge
//! the cheaper of its base and supported cost, as if a teammate were always
//! in place to help.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cost::Cost;
use crate::model::{Graph, NodeId, ProblemInstance, Solution};
use crate::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostView {
    Pessimistic,
    Optimistic { supporter_cost: Cost },
}

impl CostView {
    pub fn optimistic(inst: &ProblemInstance) -> Self {
        CostView::Optimistic { supporter_cost: inst.supporter_cost }
    }

    pub fn edge_cost(self, g: &Graph, edge: usize) -> Cost {
        let base = g.edge(edge).cost;
        match (self, g.risky_of(edge)) {
            (CostView::Optimistic { supporter_cost }, Some(r)) => base.min(r.reduced_cost + supporter_cost),
            _ => base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub cost: Cost,
}

/// Single-source costs under `view`; `None` marks unreachable nodes.
pub fn distances_from(g: &Graph, source: NodeId, view: CostView) -> Vec<Option<Cost>> {
    labels_from(g, source, view).into_iter().map(|l| l.map(|(c, _)| c)).collect()
}

/// Dijkstra over `(cost, hops)` labels, compared lexicographically.
fn labels_from(g: &Graph, source: NodeId, view: CostView) -> Vec<Option<(Cost, usize)>> {
    let mut label: Vec<Option<(Cost, usize)>> = vec![None; g.node_count()];
    let mut done = vec![false; g.node_count()];
    let mut heap = BinaryHeap::new();
    label[source] = Some((Cost::ZERO, 0));
    heap.push(Reverse((Cost::ZERO, 0usize, source)));
    while let Some(Reverse((cost, hops, u))) = heap.pop() {
        if std::mem::replace(&mut done[u], true) {
            continue;
        }
        for nb in g.neighbors(u) {
            let cand = (cost + view.edge_cost(g, nb.edge), hops + 1);
            if label[nb.node].is_none_or(|old| cand < old) {
                label[nb.node] = Some(cand);
                heap.push(Reverse((cand.0, cand.1, nb.node)));
            }
        }
    }
    label
}

/// Minimum-cost path from `src` to `dst` under `view`.
///
/// Ties are broken first by hop count and then by the lexicographically
/// smallest node sequence, so equal inputs always produce equal paths.
pub fn shortest_path(g: &Graph, src: NodeId, dst: NodeId, view: CostView) -> Option<Route> {
    let to_dst = labels_from(g, dst, view);
    let (cost, _) = to_dst[src]?;
    let mut nodes = vec![src];
    let mut at = src;
    while at != dst {
        let (here_cost, here_hops) = to_dst[at].expect("on a shortest path");
        let next = g
            .neighbors(at)
            .iter()
            .find(|nb| {
                to_dst[nb.node].is_some_and(|(c, h)| {
                    h + 1 == here_hops && c + view.edge_cost(g, nb.edge) == here_cost
                })
            })
            .expect("shortest path successor");
        at = next.node;
        nodes.push(at);
    }
    Some(Route { nodes, cost })
}

/// Per-robot cost-to-goal tables, computed once per solve.
#[derive(Debug, Clone)]
pub struct GoalDistances {
    per_robot: Vec<Vec<Option<Cost>>>,
}

impl GoalDistances {
    /// Distance from `node` to robot `robot`'s goal.
    pub fn get(&self, robot: usize, node: NodeId) -> Option<Cost> {
        self.per_robot[robot][node]
    }

    pub fn robot(&self, robot: usize) -> &[Option<Cost>] {
        &self.per_robot[robot]
    }

    /// Sum of per-robot distances for a joint location vector.
    pub fn joint(&self, locations: &[NodeId]) -> Option<Cost> {
        locations.iter().enumerate().map(|(n, &l)| self.get(n, l)).sum()
    }
}

/// Backward search from every goal (the graph is undirected, so the
/// distance from `v` to the goal equals the distance from the goal to `v`).
pub fn all_goal_distances(inst: &ProblemInstance, view: CostView) -> GoalDistances {
    let mut cache: Vec<(NodeId, Vec<Option<Cost>>)> = Vec::new();
    let per_robot = inst
        .goals
        .iter()
        .map(|&goal| {
            if let Some((_, d)) = cache.iter().find(|(g, _)| *g == goal) {
                return d.clone();
            }
            let d = distances_from(&inst.graph, goal, view);
            cache.push((goal, d.clone()));
            d
        })
        .collect();
    GoalDistances { per_robot }
}

/// All-pairs distances, one Dijkstra per node.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    rows: Vec<Vec<Option<Cost>>>,
}

impl DistanceTable {
    pub fn new(g: &Graph, view: CostView) -> Self {
        DistanceTable { rows: (0..g.node_count()).map(|s| distances_from(g, s, view)).collect() }
    }

    /// Distances from `sources` only. Edges are undirected, so a query is
    /// answered from whichever endpoint has a row.
    pub fn from_sources(g: &Graph, sources: impl IntoIterator<Item = NodeId>, view: CostView) -> Self {
        let mut rows = vec![Vec::new(); g.node_count()];
        for s in sources {
            if rows[s].is_empty() {
                rows[s] = distances_from(g, s, view);
            }
        }
        DistanceTable { rows }
    }

    /// Panics if neither node has a row.
    pub fn get(&self, from: NodeId, to: NodeId) -> Option<Cost> {
        if self.rows[from].is_empty() {
            self.rows[to][from]
        } else {
            self.rows[from][to]
        }
    }
}

/// Every robot follows its own pessimistic shortest path; nobody waits for or
/// supports anybody. Shorter paths are padded with stays at the goal.
pub fn naive_solve(inst: &ProblemInstance) -> Result<Solution, SolveError> {
    let mut paths = Vec::with_capacity(inst.robot_count());
    let mut costs = Vec::with_capacity(inst.robot_count());
    for (n, (&s, &t)) in inst.starts.iter().zip(&inst.goals).enumerate() {
        let route = shortest_path(&inst.graph, s, t, CostView::Pessimistic)
            .ok_or_else(|| SolveError::Infeasible(format!("goal of robot {n} is unreachable")))?;
        paths.push(route.nodes);
        costs.push(route.cost);
    }
    pad_paths(&mut paths);
    Ok(Solution::new(paths, vec![], costs))
}

/// Extends every path by repeating its last node until all have equal length.
pub(crate) fn pad_paths(paths: &mut [Vec<NodeId>]) {
    let len = paths.iter().map(Vec::len).max().unwrap_or(0);
    for p in paths.iter_mut() {
        let last = *p.last().expect("non-empty path");
        p.resize(len, last);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{line, t1};
    use crate::model::validate_solution;

    #[test]
    fn t1_paths_under_both_views() {
        let inst = t1();
        let pess = shortest_path(&inst.graph, 0, 2, CostView::Pessimistic).unwrap();
        assert_eq!(pess, Route { nodes: vec![0, 1, 2], cost: Cost::new(11) });
        let opt = shortest_path(&inst.graph, 0, 2, CostView::optimistic(&inst)).unwrap();
        assert_eq!(opt, Route { nodes: vec![0, 1, 2], cost: Cost::new(3) });
        for view in [CostView::Pessimistic, CostView::optimistic(&inst)] {
            assert_eq!(shortest_path(&inst.graph, 3, 3, view).unwrap(), Route { nodes: vec![3], cost: Cost::ZERO });
        }
    }

    #[test]
    fn t1_optimistic_goal_distances() {
        let inst = t1();
        let d = all_goal_distances(&inst, CostView::optimistic(&inst));
        let row = |r: usize| d.robot(r).iter().map(|c| c.unwrap()).collect::<Vec<_>>();
        assert_eq!(row(0), [3, 2, 0, 5].map(Cost::new));
        assert_eq!(row(1), [2, 3, 5, 0].map(Cost::new));
        assert_eq!(d.joint(&inst.goals), Some(Cost::ZERO));
    }

    #[test]
    fn ties_prefer_fewer_hops_then_smaller_ids() {
        // Square 0-1-3, 0-2-3 with equal costs, plus a zero-cost chord pair.
        let g = Graph::new(
            5,
            vec![
                Edge::new(0, 2, Cost::new(1)),
                Edge::new(2, 3, Cost::new(1)),
                Edge::new(0, 1, Cost::new(1)),
                Edge::new(1, 3, Cost::new(1)),
                Edge::new(0, 4, Cost::new(2)),
                Edge::new(4, 3, Cost::ZERO),
            ],
            vec![],
        );
        let r = shortest_path(&g, 0, 3, CostView::Pessimistic).unwrap();
        assert_eq!(r.nodes, vec![0, 1, 3]);
        assert_eq!(r.cost, Cost::new(2));
    }

    #[test]
    fn naive_plans() {
        let sol = naive_solve(&t1()).unwrap();
        assert_eq!(sol.total_cost, Cost::new(11));
        assert_eq!(sol.paths, vec![vec![0, 1, 2], vec![3, 3, 3]]);
        assert_eq!(validate_solution(&t1(), &sol), Ok(Cost::new(11)));

        let still = line(1, vec![0], vec![0]);
        assert_eq!(naive_solve(&still).unwrap().total_cost, Cost::ZERO);
    }

    use crate::model::Edge;
}
