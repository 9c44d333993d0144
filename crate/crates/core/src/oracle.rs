//! Brute-force optimum for tiny instances.
//!
//! Every joint state is enumerated, every joint move out of it, and for each
//! move every admissible set of support triples. Costs come straight from
//! the transition accounting in [`crate::model`]; nothing here shares code
//! with the matching used by the joint-state search. A backward sweep over
//! step budgets `0..=T` then yields the cheapest cost-to-goal of every state.

use crate::cost::Cost;
use crate::model::{transition_cost, Coordination, CoordinationEvent, EdgeKey, JointState, JointTransition, NodeId, ProblemInstance, Solution};
use crate::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_robots: usize,
    /// Step budget; `None` means twice the node count. A horizon stored on
    /// the instance takes precedence.
    pub max_steps: Option<usize>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_nodes: 6, max_robots: 3, max_steps: None }
    }
}

/// Cheapest way of performing one joint move.
#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cost: Cost,
    coordination: Vec<Coordination>,
}

/// Optimal cost-to-goal of every joint state within the step budget.
#[derive(Debug, Clone)]
pub struct OracleTable {
    inst: ProblemInstance,
    nodes: usize,
    steps: usize,
    arcs: Vec<Vec<Arc>>,
    /// `value[k][s]`: cheapest cost from `s` to the goal in at most `k` steps.
    value: Vec<Vec<Option<Cost>>>,
}

impl OracleTable {
    pub fn build(inst: &ProblemInstance, limits: &OracleLimits) -> Result<Self, SolveError> {
        let nodes = inst.graph.node_count();
        let robots = inst.robot_count();
        if nodes > limits.max_nodes {
            return Err(SolveError::ResourceLimit { what: "oracle node count", limit: limits.max_nodes as u64 });
        }
        if robots > limits.max_robots {
            return Err(SolveError::ResourceLimit { what: "oracle robot count", limit: limits.max_robots as u64 });
        }
        let steps = inst.horizon.or(limits.max_steps).unwrap_or(2 * nodes);
        let count = nodes.pow(robots as u32);
        let mut table = OracleTable { inst: inst.clone(), nodes, steps, arcs: Vec::with_capacity(count), value: vec![] };

        for s in 0..count {
            let from = table.locations(s);
            let mut arcs = Vec::new();
            for to in joint_moves(inst, &from) {
                if to == from {
                    continue;
                }
                if let Some((cost, coordination)) = cheapest_assignment(inst, &from, &to) {
                    arcs.push(Arc { to: table.index(&to), cost, coordination });
                }
            }
            table.arcs.push(arcs);
        }

        let goal = table.index(&inst.goals);
        let mut current: Vec<Option<Cost>> = vec![None; count];
        current[goal] = Some(Cost::ZERO);
        table.value.push(current.clone());
        for _ in 0..steps {
            let next: Vec<Option<Cost>> = (0..count)
                .map(|s| {
                    if s == goal {
                        return Some(Cost::ZERO);
                    }
                    table.arcs[s].iter().filter_map(|a| current[a.to].map(|v| v + a.cost)).min()
                })
                .collect();
            table.value.push(next.clone());
            current = next;
        }
        Ok(table)
    }

    pub fn step_budget(&self) -> usize {
        self.steps
    }

    fn index(&self, locs: &[NodeId]) -> usize {
        locs.iter().fold(0, |acc, &l| acc * self.nodes + l)
    }

    fn locations(&self, mut index: usize) -> Vec<NodeId> {
        let mut locs = vec![0; self.inst.robot_count()];
        for slot in locs.iter_mut().rev() {
            *slot = index % self.nodes;
            index /= self.nodes;
        }
        locs
    }

    /// Optimal remaining cost from `locs` within the full step budget.
    pub fn cost_to_go(&self, locs: &[NodeId]) -> Option<Cost> {
        self.value[self.steps][self.index(locs)]
    }

    /// Optimal remaining cost from `locs` within `budget` steps.
    pub fn cost_to_go_within(&self, locs: &[NodeId], budget: usize) -> Option<Cost> {
        self.value[budget.min(self.steps)][self.index(locs)]
    }

    /// An optimal plan from the instance's start locations.
    pub fn plan(&self) -> Result<Solution, SolveError> {
        let inst = &self.inst;
        let goal = self.index(&inst.goals);
        let mut s = self.index(&inst.starts);
        let mut budget = self.steps;
        let mut target = self.value[budget][s]
            .ok_or_else(|| SolveError::Infeasible(format!("goal not reachable within {} steps", self.steps)))?;
        let mut states = vec![inst.starts.clone()];
        let mut events = Vec::new();
        while s != goal {
            let arc = self.arcs[s]
                .iter()
                .find(|a| self.value[budget - 1][a.to].is_some_and(|v| v + a.cost == target))
                .expect("optimal value is attained by some move");
            let (from, to) = (self.locations(s), self.locations(arc.to));
            let step = states.len() - 1;
            events.extend(arc.coordination.iter().map(|c| CoordinationEvent {
                step,
                receiver: c.receiver,
                supporter: c.supporter,
                edge: [from[c.receiver], to[c.receiver]],
                support_node: from[c.supporter],
            }));
            target -= arc.cost;
            budget -= 1;
            s = arc.to;
            states.push(to);
        }
        let paths = (0..inst.robot_count()).map(|n| states.iter().map(|st| st[n]).collect()).collect();
        Ok(Solution::from_timeline(inst, paths, events).expect("oracle moves are legal"))
    }
}

/// Every combination of per-robot stay-or-move choices, all-stay included.
fn joint_moves(inst: &ProblemInstance, from: &[NodeId]) -> Vec<Vec<NodeId>> {
    let mut out = vec![vec![]];
    for &l in from {
        let options: Vec<NodeId> = std::iter::once(l).chain(inst.graph.neighbors(l).iter().map(|nb| nb.node)).collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect();
    }
    out
}

/// Tries every set of support triples allowed for this move and keeps the
/// cheapest. Ties go to the set listed first.
fn cheapest_assignment(inst: &ProblemInstance, from: &[NodeId], to: &[NodeId]) -> Option<(Cost, Vec<Coordination>)> {
    let robots = from.len();
    let mut triples = Vec::new();
    for r in 0..robots {
        if from[r] == to[r] {
            continue;
        }
        let edge = EdgeKey::new(from[r], to[r]);
        let Some(risky) = inst.graph.risky(edge) else { continue };
        for s in 0..robots {
            if s != r && from[s] == to[s] && risky.support_nodes.contains(&from[s]) {
                triples.push(Coordination { receiver: r, supporter: s, edge });
            }
        }
    }

    let mut best: Option<(Cost, Vec<Coordination>)> = None;
    let mut chosen = Vec::new();
    subsets(&triples, 0, &mut chosen, &mut |set| {
        let tr = JointTransition { from: JointState(from.to_vec()), to: JointState(to.to_vec()), coordination: set.to_vec() };
        if let Ok(cost) = transition_cost(inst, &tr) {
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, set.to_vec()));
            }
        }
    });
    best
}

fn subsets(
    triples: &[Coordination],
    at: usize,
    chosen: &mut Vec<Coordination>,
    visit: &mut dyn FnMut(&[Coordination]),
) {
    if at == triples.len() {
        visit(chosen);
        return;
    }
    subsets(triples, at + 1, chosen, visit);
    let t = triples[at];
    let busy = |robot: usize| chosen.iter().any(|c| c.receiver == robot || c.supporter == robot);
    if !busy(t.receiver) && !busy(t.supporter) {
        chosen.push(t);
        subsets(triples, at + 1, chosen, visit);
        chosen.pop();
    }
}

/// Optimal plan and its cost.
pub fn oracle_solve(inst: &ProblemInstance, limits: &OracleLimits) -> Result<(Solution, Cost), SolveError> {
    let table = OracleTable::build(inst, limits)?;
    let sol = table.plan()?;
    let cost = sol.total_cost;
    Ok((sol, cost))
}
