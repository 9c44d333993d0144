//! Coordination-exhaustive search.
//!
//! Start from every robot's own cheapest path, then try every way of adding
//! support behaviors: a subset of support pairs, an order for it, a crossing
//! direction for each risky edge and an ordered (receiver, supporter) robot
//! pair for each element. A candidate is priced by chaining pessimistic
//! shortest-path segments through each robot's waypoints, with supported
//! crossings charged the supported cost. Robots wait for one another at no
//! cost, so only the order of the support events matters, not their times.

use serde::Serialize;

use crate::cost::Cost;
use crate::model::{CoordinationEvent, EdgeKey, NodeId, ProblemInstance, Solution};
use crate::routing::{naive_solve, pad_paths, shortest_path, CostView, DistanceTable};
use crate::{Deadline, SolveError};

/// A risky edge together with one of its support nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportPair {
    pub edge: EdgeKey,
    pub support_node: NodeId,
}

/// A stop on a robot's route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Waypoint {
    /// Cross the risky edge `from -> to` as receiver.
    Cross { from: NodeId, to: NodeId },
    /// Stand on this node as supporter.
    Support(NodeId),
}

/// One support behavior in a candidate plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub receiver: usize,
    pub supporter: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub support_node: NodeId,
}

/// Support behaviors in execution order, and the resulting per-robot
/// waypoint lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndividualCoordinationSet {
    order: Vec<Assignment>,
    items: Vec<Vec<Waypoint>>,
}

impl IndividualCoordinationSet {
    pub fn new(robots: usize, order: Vec<Assignment>) -> Self {
        let mut items = vec![Vec::new(); robots];
        for a in &order {
            items[a.receiver].push(Waypoint::Cross { from: a.from, to: a.to });
            items[a.supporter].push(Waypoint::Support(a.support_node));
        }
        IndividualCoordinationSet { order, items }
    }

    pub fn items(&self, robot: usize) -> &[Waypoint] {
        &self.items[robot]
    }

    pub fn order(&self) -> &[Assignment] {
        &self.order
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationCounters {
    pub subsets_visited: u64,
    pub permutations_visited: u64,
    /// Complete assignments in the loop structure, priced or pruned.
    pub assignments_visited: u64,
    /// Assignments skipped because a prefix could not beat the best plan.
    pub assignments_pruned: u64,
    pub cost_calculations: u64,
}

/// Upper bound on cost calculations for `robots` robots and `pairs` support
/// pairs: `(2 N^2)^|CS| * |CS|!`, saturating.
pub fn cost_calculation_bound(robots: usize, pairs: usize) -> f64 {
    let base = 2.0 * (robots * robots) as f64;
    let factorial: f64 = (1..=pairs).map(|k| k as f64).product();
    base.powi(pairs as i32) * factorial
}

#[derive(Debug, Clone, Copy)]
pub struct CesConfig {
    pub max_uses_per_pair: usize,
    pub max_cost_calculations: u64,
    pub deadline: Deadline,
}

impl Default for CesConfig {
    fn default() -> Self {
        CesConfig { max_uses_per_pair: 1, max_cost_calculations: 1_000_000, deadline: Deadline::none() }
    }
}

/// Every (risky edge, support node) combination, sorted.
pub fn build_coordination_set(inst: &ProblemInstance) -> Vec<SupportPair> {
    inst.graph
        .risky_edges()
        .iter()
        .flat_map(|r| r.support_nodes.iter().map(|&s| SupportPair { edge: r.key, support_node: s }))
        .collect()
}

/// Prices candidate plans using tabulated pessimistic distances.
struct Pricer<'a> {
    inst: &'a ProblemInstance,
    dist: DistanceTable,
    cur: Vec<NodeId>,
    acc: Vec<Cost>,
}

impl<'a> Pricer<'a> {
    fn new(inst: &'a ProblemInstance) -> Self {
        let robots = inst.robot_count();
        Pricer { inst, dist: DistanceTable::new(&inst.graph, CostView::Pessimistic), cur: vec![0; robots], acc: vec![Cost::ZERO; robots] }
    }

    /// Total cost of the plan that walks each robot through its waypoints,
    /// or `None` if some waypoint is unreachable.
    fn price(&mut self, order: &[Assignment]) -> Option<Cost> {
        let inst = self.inst;
        self.cur.copy_from_slice(&inst.starts);
        self.acc.iter_mut().for_each(|c| *c = Cost::ZERO);
        for a in order {
            let idx = inst.graph.edge_index(a.from, a.to)?;
            let supported = inst.supported_cost(idx)?;
            self.acc[a.receiver] += self.dist.get(self.cur[a.receiver], a.from)? + supported;
            self.cur[a.receiver] = a.to;
            self.acc[a.supporter] += self.dist.get(self.cur[a.supporter], a.support_node)?;
            self.cur[a.supporter] = a.support_node;
        }
        let mut total = Cost::ZERO;
        for n in 0..inst.robot_count() {
            total += self.acc[n] + self.dist.get(self.cur[n], inst.goals[n])?;
        }
        Some(total)
    }
}

/// Prices one waypoint assignment and lays it out as a timed plan.
pub fn cost_calculation(inst: &ProblemInstance, ics: &IndividualCoordinationSet) -> Result<(Solution, Cost), SolveError> {
    let cost = Pricer::new(inst)
        .price(ics.order())
        .ok_or_else(|| SolveError::Infeasible("a waypoint is unreachable".into()))?;
    let sol = assemble(inst, ics.order())?;
    debug_assert_eq!(sol.total_cost, cost);
    Ok((sol, cost))
}

/// Builds the timed plan. Support events happen one per step in the given
/// order; each happens as soon as both robots have reached their positions
/// and the previous event is done. Robots that arrive early wait in place.
fn assemble(inst: &ProblemInstance, order: &[Assignment]) -> Result<Solution, SolveError> {
    let g = &inst.graph;
    let unreachable = || SolveError::Infeasible("a waypoint is unreachable".into());
    let mut paths: Vec<Vec<NodeId>> = inst.starts.iter().map(|&s| vec![s]).collect();
    let walk = |path: &mut Vec<NodeId>, to: NodeId| -> Result<(), SolveError> {
        let here = *path.last().expect("non-empty path");
        let route = shortest_path(g, here, to, CostView::Pessimistic).ok_or_else(unreachable)?;
        path.extend_from_slice(&route.nodes[1..]);
        Ok(())
    };
    let mut events = Vec::with_capacity(order.len());
    let mut next_free_step = 0;
    for a in order {
        walk(&mut paths[a.receiver], a.from)?;
        walk(&mut paths[a.supporter], a.support_node)?;
        let step = (paths[a.receiver].len() - 1).max(paths[a.supporter].len() - 1).max(next_free_step);
        paths[a.receiver].resize(step + 1, a.from);
        paths[a.supporter].resize(step + 2, a.support_node);
        paths[a.receiver].push(a.to);
        events.push(CoordinationEvent {
            step,
            receiver: a.receiver,
            supporter: a.supporter,
            edge: [a.from, a.to],
            support_node: a.support_node,
        });
        next_free_step = step + 1;
    }
    for (n, path) in paths.iter_mut().enumerate() {
        walk(path, inst.goals[n])?;
    }
    pad_paths(&mut paths);
    Solution::from_timeline(inst, paths, events).map_err(|v| SolveError::Infeasible(v.to_string()))
}

/// Steps `digits` through every value below `radix` per position, last
/// position fastest. Returns false after the final combination.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix[k] {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Lexicographic next permutation; handles repeated elements.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else { return false };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Per-robot running totals while a candidate is being built.
#[derive(Debug, Clone, Copy)]
struct RobotState {
    at: NodeId,
    paid: Cost,
    /// `paid` plus the pessimistic distance from `at` to the goal.
    exact: Cost,
    /// `paid` plus the optimistic distance from `at` to the goal.
    lower: Cost,
}

/// Depth-first walk over the (robot pair, direction) choices for one ordered
/// list of support pairs. A complete candidate is priced in constant time
/// from the running totals. A prefix whose optimistic completion already
/// costs at least the best plan found is dropped with everything below it.
struct Walk<'a> {
    inst: &'a ProblemInstance,
    cfg: &'a CesConfig,
    pairs: Vec<SupportPair>,
    crossing: Vec<Option<Cost>>,
    robot_pairs: Vec<(usize, usize)>,
    pessimistic: DistanceTable,
    optimistic: DistanceTable,
    robots: Vec<RobotState>,
    exact: Cost,
    lower: Cost,
    order: Vec<Assignment>,
    best_cost: Cost,
    best_order: Option<Vec<Assignment>>,
    counters: EnumerationCounters,
}

impl<'a> Walk<'a> {
    fn new(inst: &'a ProblemInstance, cfg: &'a CesConfig) -> Result<Self, SolveError> {
        let pairs = build_coordination_set(inst);
        let crossing = pairs
            .iter()
            .map(|p| {
                let (lo, hi) = p.edge.endpoints();
                inst.graph.edge_index(lo, hi).and_then(|e| inst.supported_cost(e))
            })
            .collect();
        let n = inst.robot_count();
        let robot_pairs = (0..n).flat_map(|r| (0..n).filter(move |&s| s != r).map(move |s| (r, s))).collect();
        let waypoints: Vec<NodeId> = pairs
            .iter()
            .flat_map(|p| [p.edge.lo(), p.edge.hi(), p.support_node])
            .chain(inst.starts.iter().copied())
            .chain(inst.goals.iter().copied())
            .collect();
        let pessimistic = DistanceTable::from_sources(&inst.graph, waypoints.iter().copied(), CostView::Pessimistic);
        let optimistic = DistanceTable::from_sources(&inst.graph, inst.goals.iter().copied(), CostView::optimistic(inst));
        let unreachable = || SolveError::Infeasible("goal unreachable".into());
        let robots = inst
            .starts
            .iter()
            .zip(&inst.goals)
            .map(|(&s, &g)| {
                Some(RobotState { at: s, paid: Cost::ZERO, exact: pessimistic.get(s, g)?, lower: optimistic.get(s, g)? })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(unreachable)?;
        let exact = robots.iter().map(|r: &RobotState| r.exact).fold(Cost::ZERO, |a, b| a + b);
        let lower = robots.iter().map(|r| r.lower).fold(Cost::ZERO, |a, b| a + b);
        Ok(Walk {
            inst,
            cfg,
            pairs,
            crossing,
            robot_pairs,
            pessimistic,
            optimistic,
            robots,
            exact,
            lower,
            order: Vec::new(),
            best_cost: exact,
            best_order: None,
            counters: EnumerationCounters::default(),
        })
    }

    fn choices(&self) -> usize {
        2 * self.robot_pairs.len()
    }

    fn assignment(&self, pair: usize, choice: usize) -> Assignment {
        let (receiver, supporter) = self.robot_pairs[choice / 2];
        let (lo, hi) = self.pairs[pair].edge.endpoints();
        let (from, to) = if choice.is_multiple_of(2) { (lo, hi) } else { (hi, lo) };
        Assignment { receiver, supporter, from, to, support_node: self.pairs[pair].support_node }
    }

    fn moved(&self, robot: usize, leg_end: NodeId, extra: Cost, to: NodeId) -> Option<RobotState> {
        let r = self.robots[robot];
        let goal = self.inst.goals[robot];
        let paid = r.paid + self.pessimistic.get(r.at, leg_end)? + extra;
        Some(RobotState {
            at: to,
            paid,
            exact: paid + self.pessimistic.get(to, goal)?,
            lower: paid + self.optimistic.get(to, goal)?,
        })
    }

    fn set(&mut self, robot: usize, state: RobotState) -> RobotState {
        let old = std::mem::replace(&mut self.robots[robot], state);
        self.exact = self.exact - old.exact + state.exact;
        self.lower = self.lower - old.lower + state.lower;
        old
    }

    /// Applies one support behavior; returns the replaced states, or `None`
    /// if a waypoint is unreachable.
    fn apply(&mut self, pair: usize, a: &Assignment) -> Option<(RobotState, RobotState)> {
        let receiver = self.moved(a.receiver, a.from, self.crossing[pair]?, a.to)?;
        let supporter = self.moved(a.supporter, a.support_node, Cost::ZERO, a.support_node)?;
        Some((self.set(a.receiver, receiver), self.set(a.supporter, supporter)))
    }

    fn undo(&mut self, a: &Assignment, saved: (RobotState, RobotState)) {
        self.set(a.supporter, saved.1);
        self.set(a.receiver, saved.0);
    }

    fn count_calculation(&mut self) -> Result<(), SolveError> {
        self.counters.assignments_visited += 1;
        self.counters.cost_calculations += 1;
        if self.counters.cost_calculations > self.cfg.max_cost_calculations {
            return Err(SolveError::ResourceLimit { what: "cost calculations", limit: self.cfg.max_cost_calculations });
        }
        if self.counters.cost_calculations.is_multiple_of(4096) {
            self.cfg.deadline.check()?;
        }
        Ok(())
    }

    fn skip(&mut self, leaves: u64) {
        self.counters.assignments_visited = self.counters.assignments_visited.saturating_add(leaves);
        self.counters.assignments_pruned = self.counters.assignments_pruned.saturating_add(leaves);
    }

    fn descend(&mut self, elements: &[usize], depth: usize) -> Result<(), SolveError> {
        let choices = self.choices();
        let last = depth + 1 == elements.len();
        let below = (choices as u64).saturating_pow((elements.len() - depth - 1) as u32);
        let pair = elements[depth];
        for choice in 0..choices {
            let a = self.assignment(pair, choice);
            if last {
                self.count_calculation()?;
            }
            let Some(saved) = self.apply(pair, &a) else {
                if !last {
                    self.skip(below);
                }
                continue;
            };
            self.order.push(a);
            if last {
                if self.exact < self.best_cost {
                    self.best_cost = self.exact;
                    self.best_order = Some(self.order.clone());
                }
            } else if self.lower >= self.best_cost {
                self.skip(below);
            } else {
                self.descend(elements, depth + 1)?;
            }
            self.order.pop();
            self.undo(&a, saved);
        }
        Ok(())
    }
}

/// Minimum-cost plan over the naive baseline and every support assignment
/// using each support pair at most `max_uses_per_pair` times.
pub fn solve_ces(inst: &ProblemInstance, cfg: &CesConfig) -> Result<(Solution, EnumerationCounters), SolveError> {
    let mut walk = Walk::new(inst, cfg)?;
    if walk.exact <= walk.lower {
        return Ok((naive_solve(inst)?, EnumerationCounters::default()));
    }

    let mut uses = vec![0usize; walk.pairs.len()];
    let use_radix = vec![cfg.max_uses_per_pair + 1; walk.pairs.len()];
    loop {
        walk.counters.subsets_visited += 1;
        let mut elements: Vec<usize> = uses.iter().enumerate().flat_map(|(p, &u)| std::iter::repeat_n(p, u)).collect();
        if !elements.is_empty() && walk.choices() > 0 {
            loop {
                walk.counters.permutations_visited += 1;
                walk.descend(&elements, 0)?;
                if !next_permutation(&mut elements) {
                    break;
                }
            }
        }
        if !advance(&mut uses, &use_radix) {
            break;
        }
    }

    let sol = match walk.best_order {
        Some(order) => assemble(inst, &order)?,
        None => naive_solve(inst)?,
    };
    debug_assert_eq!(sol.total_cost, walk.best_cost);
    Ok((sol, walk.counters))
}
