//! Receding-horizon pairwise planning.
//!
//! Robots still on duty are split into disjoint pairs each round. Every pair
//! plans its next `K` steps exactly on its own two-robot joint graph and
//! scores the end of the window with the optimistic distance-to-goal of both
//! robots; the whole window is then executed. A leftover robot plans alone
//! with base costs. Rounds repeat until nobody is on duty.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::jsg::coordinated_step;
use crate::model::{Coordination, CoordinationEvent, NodeId, ProblemInstance, Solution};
use crate::routing::{all_goal_distances, shortest_path, CostView, GoalDistances};
use crate::{Deadline, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingRule {
    /// Pair on-duty robots in ascending index order.
    IndexOrder,
    /// Pair robots whose optimistic routes involve the same risky edges.
    NearestSupport,
}

#[derive(Debug, Clone, Copy)]
pub struct RhocConfig {
    pub k: usize,
    pub pairing: PairingRule,
    /// Maximum number of rounds; `None` means four times the node count.
    pub step_cap: Option<usize>,
    pub deadline: Deadline,
}

impl RhocConfig {
    pub fn new(k: usize) -> Self {
        RhocConfig { k, pairing: PairingRule::IndexOrder, step_cap: None, deadline: Deadline::none() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RhocStats {
    pub rounds: u64,
    pub windows_planned: u64,
    /// Windows whose best segment made no progress and was replaced.
    pub overrides: u64,
}

/// Progress of the team between rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DutyState {
    pub locations: Vec<NodeId>,
    pub at_goal: Vec<bool>,
    pub on_duty: Vec<usize>,
    pub costs: Vec<Cost>,
}

impl DutyState {
    /// Every robot starts on duty, including robots placed on their goals:
    /// they may still be needed as supporters.
    fn new(inst: &ProblemInstance) -> Self {
        let robots = inst.robot_count();
        DutyState {
            locations: inst.starts.clone(),
            at_goal: vec![false; robots],
            on_duty: (0..robots).collect(),
            costs: vec![Cost::ZERO; robots],
        }
    }

    fn retire(&mut self, robot: usize) {
        self.at_goal[robot] = true;
        self.on_duty.retain(|&r| r != robot);
    }
}

/// A planned window for a sub-team of one or two robots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    /// Joint locations of the sub-team, starting with the current ones.
    pub states: Vec<Vec<NodeId>>,
    /// Support used in each step, indices local to the sub-team.
    pub coordination: Vec<Vec<Coordination>>,
    pub cost: Cost,
    /// Optimistic remaining cost at the end of the window.
    pub end_h: Cost,
}

impl Window {
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A* over `(sub-team locations, depth)` looking for the state where every
/// member is home, never deeper than `k` steps. The first home state popped
/// is the cheapest complete plan within the window. If none is reachable,
/// the depth-`k` state with the smallest `g + h` is returned instead. When
/// `require_progress` is set, depth-`k` states that neither lower the summed
/// heuristic nor bring a new member home are not eligible.
fn window_search(
    inst: &ProblemInstance,
    members: &[usize],
    start: &[NodeId],
    k: usize,
    h: &GoalDistances,
    supported: bool,
    require_progress: bool,
) -> Option<Window> {
    let g = &inst.graph;
    let goals: Vec<NodeId> = members.iter().map(|&r| inst.goals[r]).collect();
    let h_of = |locs: &[NodeId]| -> Cost {
        locs.iter().zip(members).map(|(&l, &r)| h.get(r, l).expect("connected graph")).sum()
    };
    let h_start = h_of(start);
    let home = |locs: &[NodeId]| locs.iter().zip(&goals).filter(|(l, g)| l == g).count();
    let home_start = home(start);
    let progressed = |locs: &[NodeId]| {
        let end = h_of(locs);
        end < h_start || (end == h_start && home(locs) > home_start)
    };

    type Key = (Vec<NodeId>, usize);
    let mut best_g: FxHashMap<Key, (Cost, Option<Key>, Vec<Coordination>)> = FxHashMap::default();
    let mut closed: FxHashMap<Key, ()> = FxHashMap::default();
    let mut frontier = BinaryHeap::new();
    let root: Key = (start.to_vec(), 0);
    best_g.insert(root.clone(), (Cost::ZERO, None, vec![]));
    frontier.push(Reverse((h_start, h_start, root.0.clone(), 0usize, Cost::ZERO)));

    while let Some(Reverse((_, hv, locs, depth, gv))) = frontier.pop() {
        let key: Key = (locs.clone(), depth);
        if closed.contains_key(&key) || best_g[&key].0 < gv {
            continue;
        }
        closed.insert(key.clone(), ());
        if locs == goals {
            return Some(unwind(&best_g, key, gv, hv));
        }
        if depth == k {
            if !require_progress || progressed(&locs) {
                return Some(unwind(&best_g, key, gv, hv));
            }
            continue;
        }
        let options: Vec<Vec<NodeId>> = locs
            .iter()
            .map(|&l| {
                let stay = supported.then_some(l);
                stay.into_iter().chain(g.neighbors(l).iter().map(|nb| nb.node)).collect()
            })
            .collect();
        let radix: Vec<usize> = options.iter().map(Vec::len).collect();
        let mut idx = vec![0usize; locs.len()];
        loop {
            let next: Vec<NodeId> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            if next != locs {
                let (step, coordination) = if supported {
                    coordinated_step(g, inst.supporter_cost, &locs, &next, &mut 0)
                } else {
                    let c = g.base_cost(locs[0], next[0]).unwrap_or(Cost::ZERO);
                    (c, vec![])
                };
                let ng = gv + step;
                let nkey: Key = (next.clone(), depth + 1);
                if !closed.contains_key(&nkey) && best_g.get(&nkey).is_none_or(|e| ng < e.0) {
                    let nh = h_of(&next);
                    best_g.insert(nkey, (ng, Some(key.clone()), coordination));
                    frontier.push(Reverse((ng + nh, nh, next, depth + 1, ng)));
                }
            }
            if !step_digits(&mut idx, &radix) {
                break;
            }
        }
    }
    None
}

fn step_digits(digits: &mut [usize], radix: &[usize]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix[k] {
            return true;
        }
        digits[k] = 0;
    }
    false
}

type Trail = FxHashMap<(Vec<NodeId>, usize), (Cost, Option<(Vec<NodeId>, usize)>, Vec<Coordination>)>;

fn unwind(trail: &Trail, end: (Vec<NodeId>, usize), cost: Cost, end_h: Cost) -> Window {
    let mut states = Vec::new();
    let mut coordination = Vec::new();
    let mut at = Some(end);
    while let Some(key) = at {
        let (_, parent, coord) = &trail[&key];
        if parent.is_some() {
            coordination.push(coord.clone());
        }
        states.push(key.0.clone());
        at = parent.clone();
    }
    states.reverse();
    coordination.reverse();
    Window { states, coordination, cost, end_h }
}

/// Window search plus the stagnation guard: a best segment that neither
/// lowers the summed heuristic nor keeps it level with more members home is
/// replaced by the best segment that does, if one exists. Returns the window and whether the
/// replacement happened.
fn plan_window(
    inst: &ProblemInstance,
    members: &[usize],
    start: &[NodeId],
    k: usize,
    h: &GoalDistances,
) -> (Window, bool) {
    let supported = members.len() == 2;
    let best = window_search(inst, members, start, k, h, supported, false);
    match best {
        Some(w) if w.is_empty() || makes_progress(inst, members, start, &w, h) => (w, false),
        stalled => match window_search(inst, members, start, k, h, supported, true) {
            Some(forced) => (forced, true),
            None => {
                let idle = || Window {
                    states: vec![start.to_vec()],
                    coordination: vec![],
                    cost: Cost::ZERO,
                    end_h: members.iter().zip(start).map(|(&r, &l)| h.get(r, l).unwrap_or(Cost::ZERO)).sum(),
                };
                (stalled.unwrap_or_else(idle), false)
            }
        },
    }
}

/// Best `k`-step window for two robots, scored by the window cost plus both
/// robots' optimistic distances to goal at its end.
pub fn plan_pair_window(
    inst: &ProblemInstance,
    pair: (usize, usize),
    locs: (NodeId, NodeId),
    k: usize,
    h: &GoalDistances,
) -> Window {
    plan_window(inst, &[pair.0, pair.1], &[locs.0, locs.1], k, h).0
}

/// Best `k`-step window for one robot travelling alone at base costs.
pub fn plan_solo_window(inst: &ProblemInstance, robot: usize, loc: NodeId, k: usize, h: &GoalDistances) -> Window {
    plan_window(inst, &[robot], &[loc], k, h).0
}

/// Splits the on-duty robots into disjoint pairs plus at most one loner.
fn form_groups(inst: &ProblemInstance, duty: &DutyState, rule: PairingRule) -> Vec<Vec<usize>> {
    let mut free: Vec<usize> = duty.on_duty.clone();
    free.sort_unstable();
    match rule {
        PairingRule::IndexOrder => free.chunks(2).map(<[usize]>::to_vec).collect(),
        PairingRule::NearestSupport => {
            let view = CostView::optimistic(inst);
            let routes: FxHashMap<usize, Vec<NodeId>> = free
                .iter()
                .map(|&r| {
                    let route = shortest_path(&inst.graph, duty.locations[r], inst.goals[r], view);
                    (r, route.map(|p| p.nodes).unwrap_or_default())
                })
                .collect();
            let affinity = |a: usize, b: usize| -> usize {
                let (ra, rb) = (&routes[&a], &routes[&b]);
                let mut score = 0;
                for (x, y) in [(ra, rb), (rb, ra)] {
                    for w in x.windows(2) {
                        let Some(risky) = inst.graph.edge_index(w[0], w[1]).and_then(|e| inst.graph.risky_of(e)) else {
                            continue;
                        };
                        score += y.iter().filter(|&&n| risky.is_support_node(n)).count();
                    }
                }
                score
            };
            let mut groups = Vec::new();
            while let Some(a) = free.first().copied() {
                free.remove(0);
                let partner = free.iter().copied().enumerate().max_by_key(|&(i, b)| (affinity(a, b), Reverse(i)));
                match partner {
                    Some((i, b)) => {
                        free.remove(i);
                        groups.push(vec![a, b]);
                    }
                    None => groups.push(vec![a]),
                }
            }
            groups
        }
    }
}

/// Per-member cost of one window step.
fn member_step_costs(inst: &ProblemInstance, from: &[NodeId], to: &[NodeId], coordination: &[Coordination]) -> Vec<Cost> {
    let mut costs: Vec<Cost> =
        from.iter().zip(to).map(|(&a, &b)| inst.graph.base_cost(a, b).unwrap_or(Cost::ZERO)).collect();
    for c in coordination {
        let idx = inst.graph.edge_index(from[c.receiver], to[c.receiver]).expect("receiver moves");
        costs[c.receiver] = inst.supported_cost(idx).expect("risky edge");
    }
    costs
}

pub fn solve_rhoc(inst: &ProblemInstance, cfg: &RhocConfig) -> Result<(Solution, RhocStats), SolveError> {
    if cfg.k == 0 {
        return Err(SolveError::Unsupported("horizon K must be at least 1".into()));
    }
    let h = all_goal_distances(inst, CostView::optimistic(inst));
    let cap = cfg.step_cap.unwrap_or(4 * inst.graph.node_count());
    let robots = inst.robot_count();
    let mut duty = DutyState::new(inst);
    let mut stats = RhocStats::default();
    let mut paths: Vec<Vec<NodeId>> = inst.starts.iter().map(|&s| vec![s]).collect();
    let mut events = Vec::new();

    while !duty.on_duty.is_empty() {
        stats.rounds += 1;
        if stats.rounds > cap as u64 {
            return Err(SolveError::ResourceLimit { what: "planning rounds", limit: cap as u64 });
        }
        cfg.deadline.check()?;

        let groups = form_groups(inst, &duty, cfg.pairing);
        let mut windows = Vec::with_capacity(groups.len());
        for members in &groups {
            stats.windows_planned += 1;
            let start: Vec<NodeId> = members.iter().map(|&r| duty.locations[r]).collect();
            let (window, overridden) = plan_window(inst, members, &start, cfg.k, &h);
            stats.overrides += u64::from(overridden);
            windows.push(window);
        }

        let t0 = paths[0].len() - 1;
        let round_len = windows.iter().map(Window::len).max().unwrap_or(0);
        for (members, window) in groups.iter().zip(&windows) {
            for (step, pair) in window.states.windows(2).enumerate() {
                let coord = &window.coordination[step];
                for (i, c) in member_step_costs(inst, &pair[0], &pair[1], coord).into_iter().enumerate() {
                    duty.costs[members[i]] += c;
                }
                events.extend(coord.iter().map(|c| CoordinationEvent {
                    step: t0 + step,
                    receiver: members[c.receiver],
                    supporter: members[c.supporter],
                    edge: [pair[0][c.receiver], pair[1][c.receiver]],
                    support_node: pair[0][c.supporter],
                }));
            }
            let last = window.states.last().expect("window has a start");
            for (i, &r) in members.iter().enumerate() {
                paths[r].extend(window.states[1..].iter().map(|s| s[i]));
                duty.locations[r] = last[i];
            }
        }
        for path in paths.iter_mut() {
            let here = *path.last().expect("non-empty path");
            path.resize(t0 + round_len + 1, here);
        }

        for members in &groups {
            if members.iter().all(|&r| duty.locations[r] == inst.goals[r]) {
                for &r in members {
                    duty.retire(r);
                }
            }
        }
    }

    debug_assert!(duty.at_goal.iter().all(|&a| a) || robots == 0);
    let sol = Solution::from_timeline(inst, paths, events).map_err(|v| SolveError::Infeasible(v.to_string()))?;
    debug_assert_eq!(sol.per_robot_cost, duty.costs);
    Ok((sol, stats))
}

fn makes_progress(inst: &ProblemInstance, members: &[usize], start: &[NodeId], w: &Window, h: &GoalDistances) -> bool {
    let end = w.states.last().expect("window has a start");
    let sum = |locs: &[NodeId]| -> Cost { locs.iter().zip(members).map(|(&l, &r)| h.get(r, l).unwrap_or(Cost::ZERO)).sum() };
    let home = |locs: &[NodeId]| locs.iter().zip(members).filter(|&(&l, &r)| l == inst.goals[r]).count();
    let (after, before) = (sum(end), sum(start));
    after < before || (after == before && home(end) > home(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{line, t1};
    use crate::model::{validate_solution, Edge, EdgeKey, Graph, RiskyEdge};

    fn opt_h(inst: &ProblemInstance) -> GoalDistances {
        all_goal_distances(inst, CostView::optimistic(inst))
    }

    #[test]
    fn t1_pair_window_of_two_steps() {
        let inst = t1();
        let w = plan_pair_window(&inst, (0, 1), (0, 3), 2, &opt_h(&inst));
        assert_eq!(w.states, vec![vec![0, 3], vec![1, 3], vec![2, 3]]);
        assert_eq!((w.cost, w.end_h), (Cost::new(3), Cost::ZERO));
        assert_eq!(w.coordination[1], vec![Coordination { receiver: 0, supporter: 1, edge: EdgeKey::new(1, 2) }]);
    }

    #[test]
    fn t1_pair_window_of_one_step() {
        let inst = t1();
        let w = plan_pair_window(&inst, (0, 1), (1, 3), 1, &opt_h(&inst));
        assert_eq!(w.states, vec![vec![1, 3], vec![2, 3]]);
        assert_eq!(w.cost, Cost::new(2));
    }

    #[test]
    fn pair_at_home_plans_nothing() {
        let inst = t1();
        let w = plan_pair_window(&inst, (0, 1), (2, 3), 3, &opt_h(&inst));
        assert!(w.is_empty());
        assert_eq!(w.cost, Cost::ZERO);
    }

    #[test]
    fn solo_windows() {
        let inst = t1();
        let h = opt_h(&inst);
        let forced = plan_solo_window(&inst, 0, 1, 1, &h);
        assert_eq!((forced.states.clone(), forced.cost), (vec![vec![1], vec![2]], Cost::new(10)));
        assert!(plan_solo_window(&inst, 0, 2, 1, &h).is_empty());

        let path = line(3, vec![0], vec![2]);
        let w = plan_solo_window(&path, 0, 0, 1, &opt_h(&path));
        assert_eq!((w.states, w.cost), (vec![vec![0], vec![1]], Cost::new(1)));
    }

    #[test]
    fn t1_full_runs() {
        let inst = t1();
        for k in [1, 2, 4] {
            let (sol, stats) = solve_rhoc(&inst, &RhocConfig::new(k)).unwrap();
            assert_eq!(sol.total_cost, Cost::new(3), "K = {k}");
            assert_eq!(validate_solution(&inst, &sol), Ok(Cost::new(3)));
            assert_eq!(stats.overrides, 0);
        }
        assert_eq!(solve_rhoc(&inst, &RhocConfig::new(1)).unwrap().1.windows_planned, 2);
    }

    #[test]
    fn odd_teams_get_a_solo_robot() {
        let graph = Graph::new(
            4,
            vec![Edge::new(0, 1, Cost::new(1)), Edge::new(1, 2, Cost::new(10)), Edge::new(0, 3, Cost::new(2)), Edge::new(2, 3, Cost::new(3))],
            vec![RiskyEdge::new(1, 2, Cost::new(1), vec![3])],
        );
        let inst = ProblemInstance::new(graph, vec![0, 3, 1], vec![2, 3, 0], Cost::new(1));
        for pairing in [PairingRule::IndexOrder, PairingRule::NearestSupport] {
            let cfg = RhocConfig { pairing, ..RhocConfig::new(2) };
            let (sol, _) = solve_rhoc(&inst, &cfg).unwrap();
            assert!(validate_solution(&inst, &sol).is_ok());
        }
    }

    #[test]
    fn zero_horizon_is_rejected() {
        assert!(matches!(solve_rhoc(&t1(), &RhocConfig::new(0)), Err(SolveError::Unsupported(_))));
    }

    #[test]
    fn mutual_support_on_a_star_terminates() {
        let star = |costs: [i64; 3], risky: Vec<RiskyEdge>, supporter: i64, starts: Vec<usize>, goals: Vec<usize>| {
            let edges = (1..4).map(|leaf| Edge::new(0, leaf, Cost::new(costs[leaf - 1]))).collect();
            ProblemInstance::new(Graph::new(4, edges, risky), starts, goals, Cost::new(supporter))
        };
        let cases = [
            star(
                [12, 1, 14],
                vec![RiskyEdge::new(0, 1, Cost::new(1), vec![2]), RiskyEdge::new(0, 3, Cost::new(1), vec![2])],
                1,
                vec![3, 0, 1],
                vec![1, 3, 0],
            ),
            star(
                [8, 7, 2],
                vec![RiskyEdge::new(0, 1, Cost::new(3), vec![3]), RiskyEdge::new(0, 2, Cost::new(1), vec![3])],
                0,
                vec![0, 2, 1],
                vec![2, 1, 0],
            ),
        ];
        for inst in cases {
            for k in 1..=8 {
                let (sol, _) = solve_rhoc(&inst, &RhocConfig::new(k)).unwrap();
                assert_eq!(validate_solution(&inst, &sol), Ok(sol.total_cost), "K = {k}");
            }
        }
    }
}
