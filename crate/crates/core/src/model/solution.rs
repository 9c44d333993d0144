use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{EdgeKey, NodeId};
use super::instance::ProblemInstance;
use super::transition::{robot_step_costs, Accounting, Coordination, JointState, JointTransition, TransitionError};
use crate::cost::{Cost, IO_TOLERANCE};

/// A support behavior placed on the plan timeline. `edge` is directed in
/// the receiver's direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinationEvent {
    pub step: usize,
    pub receiver: usize,
    pub supporter: usize,
    pub edge: [NodeId; 2],
    pub support_node: NodeId,
}

/// Timed joint plan. `paths[n][t]` is robot `n`'s location at time `t`;
/// step `t` moves every robot from `paths[_][t]` to `paths[_][t + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solution {
    pub paths: Vec<Vec<NodeId>>,
    pub events: Vec<CoordinationEvent>,
    pub per_robot_cost: Vec<Cost>,
    pub total_cost: Cost,
}

impl Solution {
    pub fn new(paths: Vec<Vec<NodeId>>, events: Vec<CoordinationEvent>, per_robot_cost: Vec<Cost>) -> Self {
        let total_cost = per_robot_cost.iter().sum();
        Solution { paths, events, per_robot_cost, total_cost }
    }

    /// Plan for an instance whose robots all start on their goals.
    pub fn stationary(inst: &ProblemInstance) -> Self {
        Solution::new(inst.starts.iter().map(|&s| vec![s]).collect(), vec![], vec![Cost::ZERO; inst.robot_count()])
    }

    /// Builds a plan from paths and events, charging every step with the
    /// reassigned accounting.
    pub fn from_timeline(
        inst: &ProblemInstance,
        paths: Vec<Vec<NodeId>>,
        events: Vec<CoordinationEvent>,
    ) -> Result<Self, SolutionViolation> {
        let per_robot_cost = recompute_costs(inst, &paths, &events)?;
        Ok(Solution::new(paths, events, per_robot_cost))
    }

    /// Number of steps in the plan.
    pub fn makespan(&self) -> usize {
        self.paths.first().map_or(0, |p| p.len().saturating_sub(1))
    }

    pub fn joint_state(&self, t: usize) -> JointState {
        JointState(self.paths.iter().map(|p| p[t]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionViolation {
    #[error("solution has {found} paths for {expected} robots")]
    RobotCount { expected: usize, found: usize },
    #[error("path of robot {robot} is empty")]
    EmptyPath { robot: usize },
    #[error("paths have unequal lengths")]
    UnequalLengths,
    #[error("robot {robot} does not start at its start node")]
    WrongStart { robot: usize },
    #[error("robot {robot} does not end at its goal node")]
    WrongGoal { robot: usize },
    #[error("event {index} is malformed: {reason}")]
    BadEvent { index: usize, reason: String },
    #[error("step {step}: {error}")]
    Step { step: usize, error: TransitionError },
    #[error("per-robot cost count {found} differs from robot count {expected}")]
    CostCount { expected: usize, found: usize },
    #[error("robot {robot} claims cost {claimed}, recomputed {recomputed}")]
    RobotCostMismatch { robot: usize, claimed: Cost, recomputed: Cost },
    #[error("total cost claimed {claimed}, recomputed {recomputed}")]
    TotalCostMismatch { claimed: Cost, recomputed: Cost },
}

fn differs(a: Cost, b: Cost) -> bool {
    (a.to_f64() - b.to_f64()).abs() > IO_TOLERANCE
}

/// Replays the plan step by step and returns the per-robot costs under the
/// reassigned accounting.
fn recompute_costs(
    inst: &ProblemInstance,
    paths: &[Vec<NodeId>],
    events: &[CoordinationEvent],
) -> Result<Vec<Cost>, SolutionViolation> {
    let robots = inst.robot_count();
    if paths.len() != robots {
        return Err(SolutionViolation::RobotCount { expected: robots, found: paths.len() });
    }
    if let Some(robot) = paths.iter().position(|p| p.is_empty()) {
        return Err(SolutionViolation::EmptyPath { robot });
    }
    let len = paths[0].len();
    if paths.iter().any(|p| p.len() != len) {
        return Err(SolutionViolation::UnequalLengths);
    }

    let mut per_step: Vec<Vec<Coordination>> = vec![Vec::new(); len - 1];
    for (index, ev) in events.iter().enumerate() {
        let bad = |reason: &str| SolutionViolation::BadEvent { index, reason: reason.to_string() };
        if ev.step + 1 >= len {
            return Err(bad("step beyond plan end"));
        }
        if ev.receiver >= robots || ev.supporter >= robots {
            return Err(bad("unknown robot"));
        }
        let [u, v] = ev.edge;
        if paths[ev.receiver][ev.step] != u || paths[ev.receiver][ev.step + 1] != v {
            return Err(bad("receiver does not traverse the event edge in the stated direction"));
        }
        if paths[ev.supporter][ev.step] != ev.support_node {
            return Err(bad("supporter is not at the stated support node"));
        }
        per_step[ev.step].push(Coordination {
            receiver: ev.receiver,
            supporter: ev.supporter,
            edge: EdgeKey::new(u, v),
        });
    }

    let mut costs = vec![Cost::ZERO; robots];
    for (step, coordination) in per_step.into_iter().enumerate() {
        let tr = JointTransition {
            from: JointState(paths.iter().map(|p| p[step]).collect()),
            to: JointState(paths.iter().map(|p| p[step + 1]).collect()),
            coordination,
        };
        let step_costs = robot_step_costs(inst, &tr, Accounting::Reassigned)
            .map_err(|error| SolutionViolation::Step { step, error })?;
        for (total, c) in costs.iter_mut().zip(step_costs) {
            *total += c;
        }
    }
    Ok(costs)
}

/// Checks a plan against every problem constraint and recomputes its cost
/// from scratch. Returns the recomputed total on success.
pub fn validate_solution(inst: &ProblemInstance, sol: &Solution) -> Result<Cost, Vec<SolutionViolation>> {
    let robots = inst.robot_count();
    let mut violations = Vec::new();

    if sol.paths.len() == robots && sol.paths.iter().all(|p| !p.is_empty()) {
        for robot in 0..robots {
            if sol.paths[robot][0] != inst.starts[robot] {
                violations.push(SolutionViolation::WrongStart { robot });
            }
            if *sol.paths[robot].last().unwrap() != inst.goals[robot] {
                violations.push(SolutionViolation::WrongGoal { robot });
            }
        }
    }

    let recomputed = match recompute_costs(inst, &sol.paths, &sol.events) {
        Ok(c) => c,
        Err(v) => {
            violations.push(v);
            return Err(violations);
        }
    };

    if sol.per_robot_cost.len() != robots {
        violations.push(SolutionViolation::CostCount { expected: robots, found: sol.per_robot_cost.len() });
    } else {
        for (robot, (&claimed, &actual)) in sol.per_robot_cost.iter().zip(&recomputed).enumerate() {
            if differs(claimed, actual) {
                violations.push(SolutionViolation::RobotCostMismatch { robot, claimed, recomputed: actual });
            }
        }
    }
    let total: Cost = recomputed.iter().sum();
    if differs(sol.total_cost, total) {
        violations.push(SolutionViolation::TotalCostMismatch { claimed: sol.total_cost, recomputed: total });
    }

    if violations.is_empty() {
        Ok(total)
    } else {
        Err(violations)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, path) in self.paths.iter().enumerate() {
            writeln!(f, "robot {n} (cost {}): {:?}", self.per_robot_cost.get(n).copied().unwrap_or_default(), path)?;
        }
        for ev in &self.events {
            writeln!(
                f,
                "step {}: robot {} crosses {}->{} supported by robot {} at {}",
                ev.step, ev.receiver, ev.edge[0], ev.edge[1], ev.supporter, ev.support_node
            )?;
        }
        write!(f, "total cost {}", self.total_cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;

    fn optimal_t1() -> Solution {
        let event = CoordinationEvent { step: 1, receiver: 0, supporter: 1, edge: [1, 2], support_node: 3 };
        Solution::new(vec![vec![0, 1, 2], vec![3, 3, 3]], vec![event], vec![Cost::new(3), Cost::ZERO])
    }

    #[test]
    fn optimal_plan_validates_to_three() {
        assert_eq!(validate_solution(&t1(), &optimal_t1()), Ok(Cost::new(3)));
    }

    #[test]
    fn waiting_everyone_off_goal_is_rejected() {
        let mut sol = optimal_t1();
        sol.paths = vec![vec![0, 0, 1, 2], vec![3, 3, 3, 3]];
        sol.events[0].step = 2;
        let err = validate_solution(&t1(), &sol).unwrap_err();
        assert_eq!(err, vec![SolutionViolation::Step { step: 0, error: TransitionError::AllStay }]);
    }

    #[test]
    fn understated_cost_is_a_mismatch() {
        let mut sol = optimal_t1();
        sol.total_cost = Cost::new(2);
        let err = validate_solution(&t1(), &sol).unwrap_err();
        assert_eq!(
            err,
            vec![SolutionViolation::TotalCostMismatch { claimed: Cost::new(2), recomputed: Cost::new(3) }]
        );
    }

    #[test]
    fn wrong_endpoints_and_events_are_reported() {
        let mut sol = optimal_t1();
        sol.paths[0] = vec![0, 1, 1];
        let err = validate_solution(&t1(), &sol).unwrap_err();
        assert!(err.contains(&SolutionViolation::WrongGoal { robot: 0 }));
        assert!(matches!(err.last(), Some(SolutionViolation::BadEvent { index: 0, .. })));
    }

    #[test]
    fn from_timeline_charges_reassigned_costs() {
        let sol = optimal_t1();
        let rebuilt = Solution::from_timeline(&t1(), sol.paths.clone(), sol.events.clone()).unwrap();
        assert_eq!(rebuilt, sol);
    }
}
