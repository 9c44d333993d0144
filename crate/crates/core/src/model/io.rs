//! JSON instance and solution files.
//!
//! Instance files look like
//!
//! ```json
//! {
//!   "nodes": 4,
//!   "edges": [[0, 1, 1], [1, 2, 10], [0, 3, 2]],
//!   "risky": [[1, 2, 1, [3]]],
//!   "supporter_cost": 1,
//!   "starts": [0, 3],
//!   "goals": [2, 3]
//! }
//! ```
//!
//! with an optional integer `horizon`. Node ids are 0-based.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::graph::{Edge, Graph, NodeId, RiskyEdge};
use super::instance::ProblemInstance;
use super::solution::Solution;
use super::validate::{validate_instance, Violation};
use crate::cost::Cost;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    nodes: usize,
    edges: Vec<(NodeId, NodeId, Cost)>,
    #[serde(default)]
    risky: Vec<(NodeId, NodeId, Cost, Vec<NodeId>)>,
    supporter_cost: Cost,
    starts: Vec<NodeId>,
    goals: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Parses an instance file and validates it.
pub fn read_instance(text: &str) -> Result<ProblemInstance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let edges = file.edges.into_iter().map(|(u, v, c)| Edge::new(u, v, c)).collect();
    let risky = file.risky.into_iter().map(|(u, v, c, s)| RiskyEdge::new(u, v, c, s)).collect();
    let inst = ProblemInstance {
        graph: Graph::new(file.nodes, edges, risky),
        starts: file.starts,
        goals: file.goals,
        supporter_cost: file.supporter_cost,
        horizon: file.horizon,
    };
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(FormatError::Invalid(violations))
    }
}

/// Serializes an instance with one edge per line. Output is deterministic.
pub fn write_instance(inst: &ProblemInstance) -> String {
    let g = &inst.graph;
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"nodes\": {},", g.node_count());
    let edges: Vec<String> = g
        .edges()
        .iter()
        .map(|e| json(&(e.key.lo(), e.key.hi(), e.cost)))
        .collect();
    write_list(&mut out, "edges", &edges);
    let risky: Vec<String> = g
        .risky_edges()
        .iter()
        .map(|r| json(&(r.key.lo(), r.key.hi(), r.reduced_cost, r.support_nodes.clone())))
        .collect();
    write_list(&mut out, "risky", &risky);
    let _ = writeln!(out, "  \"supporter_cost\": {},", json(&inst.supporter_cost));
    let _ = writeln!(out, "  \"starts\": {},", json(&inst.starts));
    match inst.horizon {
        Some(h) => {
            let _ = writeln!(out, "  \"goals\": {},", json(&inst.goals));
            let _ = writeln!(out, "  \"horizon\": {h}");
        }
        None => {
            let _ = writeln!(out, "  \"goals\": {}", json(&inst.goals));
        }
    }
    out.push_str("}\n");
    out
}

fn write_list(out: &mut String, key: &str, items: &[String]) {
    if items.is_empty() {
        let _ = writeln!(out, "  \"{key}\": [],");
        return;
    }
    let _ = writeln!(out, "  \"{key}\": [");
    for (i, item) in items.iter().enumerate() {
        let sep = if i + 1 < items.len() { "," } else { "" };
        let _ = writeln!(out, "    {item}{sep}");
    }
    out.push_str("  ],\n");
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

pub fn read_solution(text: &str) -> Result<Solution, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_solution(sol: &Solution) -> String {
    let mut text = serde_json::to_string_pretty(sol).expect("serializable");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;
    use crate::model::Rule;

    #[test]
    fn t1_round_trips() {
        let text = write_instance(&t1());
        assert_eq!(read_instance(&text).unwrap(), t1());
        let with_horizon = t1().with_horizon(Some(4));
        assert_eq!(read_instance(&write_instance(&with_horizon)).unwrap(), with_horizon);
    }

    #[test]
    fn written_format_is_stable() {
        let expected = "{\n  \"nodes\": 4,\n  \"edges\": [\n    [0,1,1],\n    [0,3,2],\n    [1,2,10]\n  ],\n  \
                        \"risky\": [\n    [1,2,1,[3]]\n  ],\n  \"supporter_cost\": 1,\n  \"starts\": [0,3],\n  \
                        \"goals\": [2,3]\n}\n";
        assert_eq!(write_instance(&t1()), expected);
    }

    #[test]
    fn unknown_field_is_named() {
        let text = write_instance(&t1()).replace("\"nodes\"", "\"vertices\"");
        match read_instance(&text) {
            Err(FormatError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown field `vertices`"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_goal_is_a_validation_error() {
        let text = write_instance(&t1()).replace("\"goals\": [2,3]", "\"goals\": [2,4]");
        match read_instance(&text) {
            Err(FormatError::Invalid(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].rule, Rule::NodeOutOfRange);
                assert_eq!(v[0].field, "goals[1]");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn fractional_costs_survive() {
        let text = write_instance(&t1()).replace("\"supporter_cost\": 1", "\"supporter_cost\": 0.25");
        let inst = read_instance(&text).unwrap();
        assert_eq!(inst.supporter_cost, Cost::from_raw(250_000));
        assert_eq!(write_instance(&inst), text);
    }
}
