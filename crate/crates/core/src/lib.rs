//! Planners for team coordination on graphs with risky edges.
//!
//! A team of robots moves over an undirected weighted graph. Some edges are
//! risky: they become cheap when a teammate stands on one of the edge's
//! support nodes while the crossing happens. The crate provides
//!
//! * [`model`]: instances, joint transitions, plans and a feasibility checker,
//! * [`routing`]: single-robot shortest paths and the naive baseline,
//! * [`jsg`]: optimal search over the joint state graph (UCS and A*),
//! * [`ces`]: coordination-exhaustive search over support-pair assignments,
//! * [`rhoc`]: receding-horizon pairwise planning,
//! * [`oracle`]: a brute-force optimum for tiny instances.

pub mod ces;
pub mod cost;
mod deadline;
pub mod fixtures;
pub mod jsg;
pub mod model;
pub mod oracle;
pub mod rhoc;
pub mod routing;

pub use cost::Cost;
pub use deadline::Deadline;
pub use model::{NodeId, ProblemInstance, Solution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("{what} exceeded the limit of {limit}")]
    ResourceLimit { what: &'static str, limit: u64 },
    #[error("time budget exhausted")]
    Timeout,
    #[error("{0}")]
    Unsupported(String),
    #[error("no feasible plan: {0}")]
    Infeasible(String),
}
