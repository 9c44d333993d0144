//! Optimal planning on the joint state graph.
//!
//! A joint state lists every robot's location. Each edge of the joint graph
//! is one synchronized team step whose cost already contains the best
//! support assignment for that step, found by a small matching problem.
//! The graph is never built in full: successors are generated when a state
//! is expanded, and the search is either uniform-cost or A* with the sum of
//! optimistic per-robot goal distances as heuristic.

mod matching;

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;
use serde::Serialize;

pub use matching::{max_weight_matching, Candidate};

use crate::cost::Cost;
use crate::model::{Coordination, CoordinationEvent, EdgeKey, Graph, JointState, JointTransition, NodeId, ProblemInstance, Solution};
use crate::routing::{all_goal_distances, CostView};
use crate::{Deadline, SolveError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExpansionStats {
    pub states_generated: u64,
    pub states_expanded: u64,
    pub matchings_solved: u64,
    pub peak_frontier: u64,
}

/// A successor of a joint state together with its cheapest step cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor {
    pub transition: JointTransition,
    pub cost: Cost,
}

/// Cheapest support assignment for a step between two joint locations of
/// any sub-team. Robot indices in the returned coordination refer to
/// positions in `from`/`to`.
pub(crate) fn coordinated_step(
    g: &Graph,
    supporter_cost: Cost,
    from: &[NodeId],
    to: &[NodeId],
    matchings: &mut u64,
) -> (Cost, Vec<Coordination>) {
    let mut base = Cost::ZERO;
    let mut cands = Vec::new();
    for n in 0..from.len() {
        if from[n] == to[n] {
            continue;
        }
        let idx = g.edge_index(from[n], to[n]).expect("legal move");
        base += g.edge(idx).cost;
        let Some(r) = g.risky_of(idx) else { continue };
        let gain = g.edge(idx).cost - (r.reduced_cost + supporter_cost);
        if gain <= Cost::ZERO {
            continue;
        }
        for m in 0..from.len() {
            if m != n && from[m] == to[m] && r.is_support_node(from[m]) {
                cands.push(Candidate { receiver: n, supporter: m, gain });
            }
        }
    }
    if cands.is_empty() {
        return (base, vec![]);
    }
    *matchings += 1;
    let (gain, chosen) = max_weight_matching(&cands);
    let coordination = chosen
        .into_iter()
        .map(|i| {
            let c = cands[i];
            Coordination { receiver: c.receiver, supporter: c.supporter, edge: EdgeKey::new(from[c.receiver], to[c.receiver]) }
        })
        .collect();
    (base - gain, coordination)
}

/// Exact minimum step cost between two joint states over all support
/// assignments. Every robot's move must already be legal.
pub fn min_transition_cost(inst: &ProblemInstance, from: &JointState, to: &JointState) -> (Cost, Vec<Coordination>) {
    coordinated_step(&inst.graph, inst.supporter_cost, from.locations(), to.locations(), &mut 0)
}

/// Calls `visit` with every joint successor of `from` except staying in place.
fn for_each_successor(g: &Graph, from: &[NodeId], mut visit: impl FnMut(&[NodeId])) {
    let n = from.len();
    let options: Vec<Vec<NodeId>> = from
        .iter()
        .map(|&l| std::iter::once(l).chain(g.neighbors(l).iter().map(|nb| nb.node)).collect())
        .collect();
    let mut idx = vec![0usize; n];
    let mut to = from.to_vec();
    loop {
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                to[k] = options[k][idx[k]];
                break;
            }
            idx[k] = 0;
            to[k] = options[k][0];
        }
        visit(&to);
    }
}

/// All joint successors of `s`, each with its minimum step cost. The all-stay
/// successor is never produced.
pub fn expand(inst: &ProblemInstance, s: &JointState) -> Vec<Successor> {
    let mut out = Vec::new();
    for_each_successor(&inst.graph, s.locations(), |to| {
        let (cost, coordination) = coordinated_step(&inst.graph, inst.supporter_cost, s.locations(), to, &mut 0);
        out.push(Successor {
            transition: JointTransition { from: s.clone(), to: JointState(to.to_vec()), coordination },
            cost,
        });
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Uniform-cost search.
    Zero,
    /// Sum over robots of the always-supported distance to the goal.
    Optimistic,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_expanded: u64,
    /// Bound on states held in memory (closed set plus frontier).
    pub max_stored: u64,
    pub deadline: Deadline,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_expanded: 10_000_000, max_stored: 20_000_000, deadline: Deadline::none() }
    }
}

/// What an observer sees each time a state is taken off the frontier.
#[derive(Debug, Clone, Copy)]
pub struct Pop<'a> {
    pub locations: &'a [NodeId],
    pub g: Cost,
    pub h: Cost,
}

pub fn solve_ucs(inst: &ProblemInstance) -> Result<(Solution, ExpansionStats), SolveError> {
    search(inst, Heuristic::Zero, &SearchLimits::default(), None)
}

pub fn solve_astar(inst: &ProblemInstance) -> Result<(Solution, ExpansionStats), SolveError> {
    search(inst, Heuristic::Optimistic, &SearchLimits::default(), None)
}

/// Packs a joint state into a `u64`, robot 0 in the most significant bits,
/// so integer order equals lexicographic order of location vectors.
#[derive(Debug, Clone, Copy)]
struct Codec {
    bits: u32,
    robots: usize,
}

impl Codec {
    fn new(node_count: usize, robots: usize) -> Option<Self> {
        let bits = usize::BITS - node_count.saturating_sub(1).leading_zeros();
        let bits = bits.max(1);
        (bits as usize * robots <= 64).then_some(Codec { bits, robots })
    }

    fn encode(&self, locs: &[NodeId]) -> u64 {
        locs.iter().fold(0u64, |key, &l| (key << self.bits) | l as u64)
    }

    fn decode(&self, key: u64, out: &mut Vec<NodeId>) {
        out.clear();
        let mask = (1u64 << self.bits) - 1;
        for n in (0..self.robots).rev() {
            out.push(((key >> (n as u32 * self.bits)) & mask) as NodeId);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Record {
    g: Cost,
    parent: u64,
    closed: bool,
}

/// One robot's choice within a step.
#[derive(Debug, Clone, Copy)]
struct Move {
    to: NodeId,
    cost: Cost,
    /// Risky edge index when support would pay off on this move.
    risky: Option<usize>,
    gain: Cost,
}

/// Best-first search from the start to the joint goal state.
pub fn search(
    inst: &ProblemInstance,
    heuristic: Heuristic,
    limits: &SearchLimits,
    mut observer: Option<&mut dyn FnMut(Pop<'_>)>,
) -> Result<(Solution, ExpansionStats), SolveError> {
    let g = &inst.graph;
    let robots = inst.robot_count();
    let codec = Codec::new(g.node_count(), robots)
        .ok_or(SolveError::ResourceLimit { what: "joint state bits", limit: 64 })?;
    let h_table: Vec<Vec<Cost>> = match heuristic {
        Heuristic::Zero => vec![vec![Cost::ZERO; g.node_count()]; robots],
        Heuristic::Optimistic => {
            let d = all_goal_distances(inst, CostView::optimistic(inst));
            (0..robots)
                .map(|n| d.robot(n).iter().map(|c| c.expect("connected graph")).collect())
                .collect()
        }
    };
    let h_of = |locs: &[NodeId]| -> Cost { locs.iter().enumerate().map(|(n, &l)| h_table[n][l]).sum() };

    let mut stats = ExpansionStats { states_generated: 1, ..Default::default() };
    let start = codec.encode(&inst.starts);
    let goal = codec.encode(&inst.goals);
    let mut records: FxHashMap<u64, Record> = FxHashMap::default();
    records.insert(start, Record { g: Cost::ZERO, parent: start, closed: false });
    let mut frontier = BinaryHeap::new();
    let h0 = h_of(&inst.starts);
    frontier.push(Reverse((h0, h0, start, Cost::ZERO)));

    let mut locs = Vec::with_capacity(robots);
    let mut moves: Vec<Vec<Move>> = vec![Vec::new(); robots];
    let mut choice = vec![0usize; robots];
    let mut cands: Vec<Candidate> = Vec::new();

    while let Some(Reverse((_, h, key, gval))) = frontier.pop() {
        let rec = records.get_mut(&key).expect("frontier entries are recorded");
        if rec.closed || gval > rec.g {
            continue;
        }
        rec.closed = true;
        stats.states_expanded += 1;
        if stats.states_expanded > limits.max_expanded {
            return Err(SolveError::ResourceLimit { what: "expanded states", limit: limits.max_expanded });
        }
        if stats.states_expanded.is_multiple_of(16) {
            limits.deadline.check()?;
        }
        codec.decode(key, &mut locs);
        if let Some(obs) = observer.as_mut() {
            obs(Pop { locations: &locs, g: gval, h });
        }
        if key == goal {
            let sol = reconstruct(inst, &codec, &records, goal);
            debug_assert_eq!(sol.total_cost, gval);
            return Ok((sol, stats));
        }

        for (n, &l) in locs.iter().enumerate() {
            let list = &mut moves[n];
            list.clear();
            list.push(Move { to: l, cost: Cost::ZERO, risky: None, gain: Cost::ZERO });
            for nb in g.neighbors(l) {
                let cost = g.edge(nb.edge).cost;
                let gain = inst.coordination_gain(nb.edge).unwrap_or(Cost::ZERO);
                let risky = (gain > Cost::ZERO).then_some(nb.edge);
                list.push(Move { to: nb.node, cost, risky, gain });
            }
        }

        choice.iter_mut().for_each(|c| *c = 0);
        'combos: loop {
            let mut k = robots;
            loop {
                if k == 0 {
                    break 'combos;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < moves[k].len() {
                    break;
                }
                choice[k] = 0;
            }

            let mut step = Cost::ZERO;
            let mut next_key = 0u64;
            let mut next_h = Cost::ZERO;
            let mut any_receiver = false;
            for n in 0..robots {
                let m = moves[n][choice[n]];
                step += m.cost;
                next_key = (next_key << codec.bits) | m.to as u64;
                next_h += h_table[n][m.to];
                any_receiver |= m.risky.is_some();
            }
            if any_receiver {
                cands.clear();
                for n in 0..robots {
                    let Some(edge) = moves[n][choice[n]].risky else { continue };
                    let r = g.risky_of(edge).expect("risky move");
                    for m in 0..robots {
                        if choice[m] == 0 && r.is_support_node(locs[m]) {
                            cands.push(Candidate { receiver: n, supporter: m, gain: moves[n][choice[n]].gain });
                        }
                    }
                }
                if !cands.is_empty() {
                    stats.matchings_solved += 1;
                    step -= max_weight_matching(&cands).0;
                }
            }

            let next_g = gval + step;
            match records.entry(next_key) {
                Entry::Vacant(slot) => {
                    slot.insert(Record { g: next_g, parent: key, closed: false });
                    stats.states_generated += 1;
                }
                Entry::Occupied(mut slot) => {
                    let r = slot.get_mut();
                    if next_g >= r.g {
                        continue;
                    }
                    debug_assert!(!r.closed, "consistent heuristic never reopens a closed state");
                    *r = Record { g: next_g, parent: key, closed: false };
                }
            }
            frontier.push(Reverse((next_g + next_h, next_h, next_key, next_g)));
        }

        stats.peak_frontier = stats.peak_frontier.max(frontier.len() as u64);
        if records.len() as u64 + frontier.len() as u64 > limits.max_stored {
            return Err(SolveError::ResourceLimit { what: "stored states", limit: limits.max_stored });
        }
    }
    Err(SolveError::Infeasible("joint goal state is unreachable".into()))
}

fn reconstruct(inst: &ProblemInstance, codec: &Codec, records: &FxHashMap<u64, Record>, goal: u64) -> Solution {
    let mut keys = vec![goal];
    let mut at = goal;
    loop {
        let parent = records[&at].parent;
        if parent == at {
            break;
        }
        keys.push(parent);
        at = parent;
    }
    keys.reverse();
    let states: Vec<Vec<NodeId>> = keys
        .iter()
        .map(|&k| {
            let mut v = Vec::new();
            codec.decode(k, &mut v);
            v
        })
        .collect();
    timeline_from_states(inst, &states)
}

/// Turns a sequence of joint states into a plan, choosing the cheapest support
/// assignment for every step.
pub(crate) fn timeline_from_states(inst: &ProblemInstance, states: &[Vec<NodeId>]) -> Solution {
    let mut events = Vec::new();
    for (step, pair) in states.windows(2).enumerate() {
        let (from, to) = (&pair[0], &pair[1]);
        let (_, coordination) = coordinated_step(&inst.graph, inst.supporter_cost, from, to, &mut 0);
        events.extend(coordination.into_iter().map(|c| CoordinationEvent {
            step,
            receiver: c.receiver,
            supporter: c.supporter,
            edge: [from[c.receiver], to[c.receiver]],
            support_node: from[c.supporter],
        }));
    }
    let paths = (0..inst.robot_count()).map(|n| states.iter().map(|s| s[n]).collect()).collect();
    Solution::from_timeline(inst, paths, events).expect("search emits legal steps")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{line, t1};
    use crate::model::validate_solution;

    #[test]
    fn t1_supported_crossing_is_a_successor() {
        let inst = t1();
        let succ = expand(&inst, &JointState(vec![1, 3]));
        let hit = succ.iter().find(|s| s.transition.to == JointState(vec![2, 3])).unwrap();
        assert_eq!(hit.cost, Cost::new(2));
        assert_eq!(hit.transition.coordination, vec![Coordination { receiver: 0, supporter: 1, edge: EdgeKey::new(1, 2) }]);
    }

    #[test]
    fn t1_start_has_five_successors() {
        let succ = expand(&t1(), &JointState(vec![0, 3]));
        assert_eq!(succ.len(), 5);
        assert!(succ.iter().all(|s| s.transition.to != s.transition.from));
    }

    #[test]
    fn lone_robot_on_a_point_has_no_successors() {
        let inst = line(1, vec![0], vec![0]);
        assert!(expand(&inst, &JointState(vec![0])).is_empty());
    }

    #[test]
    fn min_transition_cost_cases() {
        let inst = t1();
        let (c, coord) = min_transition_cost(&inst, &JointState(vec![1, 3]), &JointState(vec![2, 3]));
        assert_eq!((c, coord.len()), (Cost::new(2), 1));
        let (c, coord) = min_transition_cost(&inst, &JointState(vec![0, 3]), &JointState(vec![1, 0]));
        assert_eq!((c, coord.len()), (Cost::new(3), 0));
    }

    #[test]
    fn t1_searches_find_three() {
        let inst = t1();
        let (ucs, ucs_stats) = solve_ucs(&inst).unwrap();
        let (astar, astar_stats) = solve_astar(&inst).unwrap();
        assert_eq!(ucs.total_cost, Cost::new(3));
        assert_eq!(astar.total_cost, Cost::new(3));
        assert!(astar_stats.states_expanded <= ucs_stats.states_expanded);
        assert!(astar_stats.states_expanded <= astar_stats.states_generated);
        assert_eq!(validate_solution(&inst, &astar), Ok(Cost::new(3)));
        assert_eq!(astar.events.len(), 1);
    }

    #[test]
    fn first_pop_sees_the_full_heuristic() {
        let inst = t1();
        let mut first = None;
        let mut obs = |p: Pop<'_>| {
            first.get_or_insert(p.h);
        };
        search(&inst, Heuristic::Optimistic, &SearchLimits::default(), Some(&mut obs)).unwrap();
        assert_eq!(first, Some(Cost::new(3)));
    }

    #[test]
    fn already_home_costs_nothing() {
        let inst = line(3, vec![0, 2], vec![0, 2]);
        let (sol, _) = solve_astar(&inst).unwrap();
        assert_eq!(sol.total_cost, Cost::ZERO);
        assert_eq!(sol.makespan(), 0);
    }

    #[test]
    fn expansion_cap_is_enforced() {
        let inst = line(6, vec![0, 5], vec![5, 0]);
        let limits = SearchLimits { max_expanded: 2, ..Default::default() };
        assert_eq!(
            search(&inst, Heuristic::Zero, &limits, None).unwrap_err(),
            SolveError::ResourceLimit { what: "expanded states", limit: 2 }
        );
    }

    #[test]
    fn codec_round_trips_and_orders_lexicographically() {
        let codec = Codec::new(30, 7).unwrap();
        let a = [3, 29, 0, 7, 7, 1, 15];
        let b = [3, 29, 1, 0, 0, 0, 0];
        let mut out = Vec::new();
        codec.decode(codec.encode(&a), &mut out);
        assert_eq!(out, a);
        assert!(codec.encode(&a) < codec.encode(&b));
        assert!(Codec::new(1 << 20, 4).is_none());
    }
}
