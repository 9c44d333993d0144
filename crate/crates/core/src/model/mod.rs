//! Problem model: graphs with risky edges, instances, joint states and
//! transitions, timed solutions, feasibility checking and file formats.

mod graph;
mod instance;
pub mod io;
mod solution;
mod transition;
mod validate;

pub use graph::{Edge, EdgeKey, Graph, Neighbor, NodeId, RiskyEdge};
pub use instance::{ConnectivityTier, InstanceDescriptor, ProblemInstance};
pub use solution::{validate_solution, CoordinationEvent, Solution, SolutionViolation};
pub use transition::{
    check_transition, robot_step_costs, transition_cost, Accounting, Coordination, JointState, JointTransition,
    TransitionError,
};
pub use validate::{validate_instance, Rule, Violation};
