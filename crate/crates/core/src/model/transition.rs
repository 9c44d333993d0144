use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{EdgeKey, NodeId};
use super::instance::ProblemInstance;
use crate::cost::Cost;

/// Locations of all robots at one time step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointState(pub Vec<NodeId>);

impl JointState {
    pub fn locations(&self) -> &[NodeId] {
        &self.0
    }
}

impl fmt::Display for JointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// One support behavior within a single step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coordination {
    pub receiver: usize,
    pub supporter: usize,
    pub edge: EdgeKey,
}

/// A synchronized team step together with its support assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTransition {
    pub from: JointState,
    pub to: JointState,
    pub coordination: Vec<Coordination>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("joint states have {from} and {to} entries for {robots} robots")]
    LengthMismatch { robots: usize, from: usize, to: usize },
    #[error("robot {robot} is at unknown node {node}")]
    InvalidNode { robot: usize, node: NodeId },
    #[error("robot {robot} cannot move from {from} to {to} in one step")]
    IllegalMove { robot: usize, from: NodeId, to: NodeId },
    #[error("all robots stay while some robot is off its goal")]
    AllStay,
    #[error("robot {robot} takes part in more than one coordination")]
    MultipleCoordinations { robot: usize },
    #[error("robot {robot} cannot support itself")]
    SelfSupport { robot: usize },
    #[error("coordination references unknown robot {robot}")]
    UnknownRobot { robot: usize },
    #[error("{edge} is not a risky edge")]
    NotRisky { edge: EdgeKey },
    #[error("receiver {receiver} does not cross {edge}")]
    ReceiverNotCrossing { receiver: usize, edge: EdgeKey },
    #[error("supporter {supporter} moves during the step")]
    SupporterMoves { supporter: usize },
    #[error("supporter {supporter} at node {node} is not a support node of {edge}")]
    NotASupportNode { supporter: usize, node: NodeId, edge: EdgeKey },
}

/// Who pays for a coordination behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accounting {
    /// Receiver pays reduced cost plus supporter cost; supporter pays nothing.
    Reassigned,
    /// Receiver pays the reduced cost; supporter pays the supporter cost.
    Original,
}

/// Checks the per-step constraints on a transition.
pub fn check_transition(inst: &ProblemInstance, tr: &JointTransition) -> Result<(), TransitionError> {
    let robots = inst.robot_count();
    let (from, to) = (tr.from.locations(), tr.to.locations());
    if from.len() != robots || to.len() != robots {
        return Err(TransitionError::LengthMismatch { robots, from: from.len(), to: to.len() });
    }
    let g = &inst.graph;
    for robot in 0..robots {
        for node in [from[robot], to[robot]] {
            if node >= g.node_count() {
                return Err(TransitionError::InvalidNode { robot, node });
            }
        }
        if from[robot] != to[robot] && !g.are_adjacent(from[robot], to[robot]) {
            return Err(TransitionError::IllegalMove { robot, from: from[robot], to: to[robot] });
        }
    }
    if from == to && from != inst.goals.as_slice() {
        return Err(TransitionError::AllStay);
    }

    let mut engaged = vec![false; robots];
    for c in &tr.coordination {
        for robot in [c.receiver, c.supporter] {
            if robot >= robots {
                return Err(TransitionError::UnknownRobot { robot });
            }
        }
        if c.receiver == c.supporter {
            return Err(TransitionError::SelfSupport { robot: c.receiver });
        }
        for robot in [c.receiver, c.supporter] {
            if std::mem::replace(&mut engaged[robot], true) {
                return Err(TransitionError::MultipleCoordinations { robot });
            }
        }
        let risky = g.risky(c.edge).ok_or(TransitionError::NotRisky { edge: c.edge })?;
        let (r_from, r_to) = (from[c.receiver], to[c.receiver]);
        if r_from == r_to || EdgeKey::new(r_from, r_to) != c.edge {
            return Err(TransitionError::ReceiverNotCrossing { receiver: c.receiver, edge: c.edge });
        }
        if from[c.supporter] != to[c.supporter] {
            return Err(TransitionError::SupporterMoves { supporter: c.supporter });
        }
        if !risky.is_support_node(from[c.supporter]) {
            return Err(TransitionError::NotASupportNode {
                supporter: c.supporter,
                node: from[c.supporter],
                edge: c.edge,
            });
        }
    }
    Ok(())
}

/// Per-robot cost of one step under the chosen accounting.
pub fn robot_step_costs(
    inst: &ProblemInstance,
    tr: &JointTransition,
    accounting: Accounting,
) -> Result<Vec<Cost>, TransitionError> {
    check_transition(inst, tr)?;
    let g = &inst.graph;
    let (from, to) = (tr.from.locations(), tr.to.locations());
    let mut costs: Vec<Cost> = (0..from.len())
        .map(|n| {
            if from[n] == to[n] {
                Cost::ZERO
            } else {
                g.base_cost(from[n], to[n]).expect("checked adjacency")
            }
        })
        .collect();
    for c in &tr.coordination {
        let reduced = g.risky(c.edge).expect("checked risky").reduced_cost;
        match accounting {
            Accounting::Reassigned => costs[c.receiver] = reduced + inst.supporter_cost,
            Accounting::Original => {
                costs[c.receiver] = reduced;
                costs[c.supporter] = inst.supporter_cost;
            }
        }
    }
    Ok(costs)
}

/// Team cost of one step: supported receivers pay the supported cost,
/// supporters and stayers pay nothing, every other mover pays the base cost.
pub fn transition_cost(inst: &ProblemInstance, tr: &JointTransition) -> Result<Cost, TransitionError> {
    Ok(robot_step_costs(inst, tr, Accounting::Reassigned)?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;

    fn tr(from: [usize; 2], to: [usize; 2], coordination: Vec<Coordination>) -> JointTransition {
        JointTransition { from: JointState(from.to_vec()), to: JointState(to.to_vec()), coordination }
    }

    fn support(receiver: usize, supporter: usize) -> Coordination {
        Coordination { receiver, supporter, edge: EdgeKey::new(1, 2) }
    }

    #[test]
    fn supported_crossing_costs_reduced_plus_supporter() {
        let inst = t1();
        assert_eq!(transition_cost(&inst, &tr([1, 3], [2, 3], vec![support(0, 1)])), Ok(Cost::new(2)));
    }

    #[test]
    fn unsupported_risky_crossing_pays_base() {
        let inst = t1();
        let step = tr([1, 0], [2, 0], vec![]);
        assert_eq!(transition_cost(&inst, &step), Ok(Cost::new(10)));
    }

    #[test]
    fn ordinary_edge_pays_base() {
        let inst = t1();
        assert_eq!(transition_cost(&inst, &tr([0, 3], [1, 3], vec![])), Ok(Cost::new(1)));
    }

    #[test]
    fn invalid_transitions_are_rejected() {
        let inst = t1();
        assert_eq!(
            transition_cost(&inst, &tr([0, 3], [2, 3], vec![])),
            Err(TransitionError::IllegalMove { robot: 0, from: 0, to: 2 })
        );
        assert_eq!(transition_cost(&inst, &tr([0, 3], [0, 3], vec![])), Err(TransitionError::AllStay));
        assert!(matches!(
            transition_cost(&inst, &tr([1, 0], [2, 0], vec![support(0, 1)])),
            Err(TransitionError::NotASupportNode { .. })
        ));
        assert!(matches!(
            transition_cost(&inst, &tr([1, 3], [2, 0], vec![support(0, 1)])),
            Err(TransitionError::SupporterMoves { .. })
        ));
        assert!(matches!(
            transition_cost(&inst, &tr([1, 3], [2, 3], vec![support(0, 0)])),
            Err(TransitionError::SelfSupport { .. })
        ));
        assert!(matches!(
            transition_cost(&inst, &tr([0, 3], [1, 3], vec![support(0, 1)])),
            Err(TransitionError::ReceiverNotCrossing { .. })
        ));
        let twice = vec![support(0, 1), support(0, 1)];
        assert!(matches!(
            transition_cost(&inst, &tr([1, 3], [2, 3], twice)),
            Err(TransitionError::MultipleCoordinations { .. })
        ));
    }

    #[test]
    fn terminal_all_stay_is_free() {
        let inst = t1();
        assert_eq!(transition_cost(&inst, &tr([2, 3], [2, 3], vec![])), Ok(Cost::ZERO));
    }

    #[test]
    fn original_accounting_charges_supporter() {
        let inst = t1();
        let step = tr([1, 3], [2, 3], vec![support(0, 1)]);
        assert_eq!(robot_step_costs(&inst, &step, Accounting::Original), Ok(vec![Cost::new(1), Cost::new(1)]));
        assert_eq!(
            robot_step_costs(&inst, &step, Accounting::Reassigned),
            Ok(vec![Cost::new(2), Cost::ZERO])
        );
    }
}
