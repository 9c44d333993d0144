//! Runs solvers on instances and collects benchmark records.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tcgre_core::ces::{solve_ces, CesConfig};
use tcgre_core::jsg::{search, Heuristic, SearchLimits};
use tcgre_core::model::{validate_solution, InstanceDescriptor};
use tcgre_core::oracle::{oracle_solve, OracleLimits};
use tcgre_core::rhoc::{solve_rhoc, PairingRule, RhocConfig};
use tcgre_core::routing::naive_solve;
use tcgre_core::{Cost, Deadline, ProblemInstance, Solution, SolveError};

use crate::generator::{generate_instance, GeneratorConfig, GeneratorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    JsgUcs,
    JsgAstar,
    Ces,
    RhocAstar,
    Naive,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::JsgUcs, Algorithm::JsgAstar, Algorithm::Ces, Algorithm::RhocAstar, Algorithm::Naive, Algorithm::Oracle];

    /// The four methods compared in the benchmark.
    pub const COMPARED: [Algorithm; 4] = [Algorithm::JsgUcs, Algorithm::JsgAstar, Algorithm::Ces, Algorithm::RhocAstar];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::JsgUcs => "jsg-ucs",
            Algorithm::JsgAstar => "jsg-astar",
            Algorithm::Ces => "ces",
            Algorithm::RhocAstar => "rhoc-astar",
            Algorithm::Naive => "naive",
            Algorithm::Oracle => "oracle",
        }
    }

    /// Whether the method returns a provably optimal plan.
    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::JsgUcs | Algorithm::JsgAstar | Algorithm::Oracle)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Per-solve knobs shared by the CLI and the benchmark.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub k: usize,
    pub max_uses: usize,
    pub timeout: Duration,
    pub max_cost_calculations: u64,
    pub pairing: PairingRule,
    pub search_limits: SearchLimits,
    pub oracle_limits: OracleLimits,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            k: 3,
            max_uses: 1,
            timeout: Duration::from_secs(60),
            max_cost_calculations: CesConfig::default().max_cost_calculations,
            pairing: PairingRule::IndexOrder,
            search_limits: SearchLimits::default(),
            oracle_limits: OracleLimits::default(),
        }
    }
}

/// Work counters reported by whichever solver ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub expanded: Option<u64>,
    pub generated: Option<u64>,
    pub cost_calcs: Option<u64>,
    pub windows: Option<u64>,
    pub overrides: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub result: Result<Solution, SolveError>,
    pub runtime: Duration,
    pub counters: Counters,
}

/// Runs one solver with a wall-clock budget of `opts.timeout`.
pub fn run_solver(inst: &ProblemInstance, algorithm: Algorithm, opts: &SolverOptions) -> Outcome {
    let started = Instant::now();
    let deadline = Deadline::at(started + opts.timeout);
    let mut counters = Counters::default();
    let result = match algorithm {
        Algorithm::JsgUcs | Algorithm::JsgAstar => {
            let heuristic = if algorithm == Algorithm::JsgUcs { Heuristic::Zero } else { Heuristic::Optimistic };
            let limits = SearchLimits { deadline, ..opts.search_limits };
            search(inst, heuristic, &limits, None).map(|(sol, stats)| {
                counters.expanded = Some(stats.states_expanded);
                counters.generated = Some(stats.states_generated);
                sol
            })
        }
        Algorithm::Ces => {
            let cfg = CesConfig { max_uses_per_pair: opts.max_uses, max_cost_calculations: opts.max_cost_calculations, deadline };
            solve_ces(inst, &cfg).map(|(sol, c)| {
                counters.cost_calcs = Some(c.cost_calculations);
                sol
            })
        }
        Algorithm::RhocAstar => {
            let cfg = RhocConfig { pairing: opts.pairing, deadline, ..RhocConfig::new(opts.k) };
            solve_rhoc(inst, &cfg).map(|(sol, stats)| {
                counters.windows = Some(stats.windows_planned);
                counters.overrides = Some(stats.overrides);
                sol
            })
        }
        Algorithm::Naive => naive_solve(inst),
        Algorithm::Oracle => oracle_solve(inst, &opts.oracle_limits).map(|(sol, _)| sol),
    };
    Outcome { algorithm, result, runtime: started.elapsed(), counters }
}

/// Result of re-checking a plan against the instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verification {
    Passed { recomputed: Cost },
    Failed { violations: Vec<String> },
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub instance: InstanceDescriptor,
    pub cost: Option<Cost>,
    /// Best cost found by an exact method on the same instance.
    pub optimal: Option<Cost>,
    pub naive: Cost,
    /// `optimal / cost`.
    pub true_optimality: Option<f64>,
    /// `naive / cost`.
    pub naive_optimality: Option<f64>,
    pub runtime_s: f64,
    pub timeout: bool,
    /// Not run because the same method already failed on this graph with
    /// fewer robots.
    pub skipped: bool,
    pub failure: Option<String>,
    pub counters: Counters,
    pub verification: Option<Verification>,
}

/// What to run: every graph with every team size and every algorithm.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub graphs: Vec<GeneratorConfig>,
    pub team_sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub options: SolverOptions,
    /// Once an exact method fails on a graph, record the larger teams on that
    /// graph as failures without running them.
    pub skip_exact_after_failure: bool,
    /// Print one line per finished run on standard error.
    pub progress: bool,
}

fn record(inst: &ProblemInstance, descriptor: &InstanceDescriptor, naive: Cost, outcome: Outcome) -> BenchRecord {
    let (cost, verification, failure) = match &outcome.result {
        Ok(sol) => {
            let verification = match validate_solution(inst, sol) {
                Ok(recomputed) => Verification::Passed { recomputed },
                Err(v) => Verification::Failed { violations: v.iter().map(|x| x.to_string()).collect() },
            };
            (Some(sol.total_cost), Some(verification), None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    BenchRecord {
        algorithm: outcome.algorithm,
        instance: descriptor.clone(),
        cost,
        optimal: None,
        naive,
        true_optimality: None,
        naive_optimality: cost.map(|c| naive.ratio(c)),
        runtime_s: outcome.runtime.as_secs_f64(),
        timeout: cost.is_none(),
        skipped: false,
        failure,
        counters: outcome.counters,
        verification,
    }
}

fn run_graph(plan: &BenchPlan, graph: &GeneratorConfig) -> Result<Vec<BenchRecord>, GeneratorError> {
    let mut out = Vec::new();
    let mut failed: Vec<Algorithm> = Vec::new();
    for &robots in &plan.team_sizes {
        let inst = generate_instance(&GeneratorConfig { robots, ..graph.clone() })?;
        let descriptor = InstanceDescriptor::describe(&inst, graph.tier, graph.seed);
        let naive = naive_solve(&inst).expect("generated graphs are connected").total_cost;
        let mut cell = Vec::with_capacity(plan.algorithms.len());
        for &algorithm in &plan.algorithms {
            if failed.contains(&algorithm) {
                cell.push(BenchRecord {
                    algorithm,
                    instance: descriptor.clone(),
                    cost: None,
                    optimal: None,
                    naive,
                    true_optimality: None,
                    naive_optimality: None,
                    runtime_s: 0.0,
                    timeout: true,
                    skipped: true,
                    failure: Some("skipped after a failure with fewer robots".into()),
                    counters: Counters::default(),
                    verification: None,
                });
                continue;
            }
            let rec = record(&inst, &descriptor, naive, run_solver(&inst, algorithm, &plan.options));
            if rec.timeout && algorithm.is_exact() && plan.skip_exact_after_failure {
                failed.push(algorithm);
            }
            if plan.progress {
                eprintln!(
                    "{} nodes, {}, seed {}, {robots} robots, {algorithm}: {}",
                    graph.node_count,
                    graph.tier,
                    graph.seed,
                    match rec.cost {
                        Some(c) => format!("cost {c} in {:.3} s", rec.runtime_s),
                        None => format!("failed after {:.3} s", rec.runtime_s),
                    }
                );
            }
            cell.push(rec);
        }
        let optimal = cell.iter().filter(|r| r.algorithm.is_exact()).filter_map(|r| r.cost).min();
        for r in &mut cell {
            r.optimal = optimal;
            r.true_optimality = optimal.zip(r.cost).map(|(o, c)| o.ratio(c));
        }
        out.extend(cell);
    }
    Ok(out)
}

/// Runs the whole plan. Graphs are processed in parallel; records come back
/// ordered by graph, team size and algorithm.
pub fn run_bench(plan: &BenchPlan) -> Result<Vec<BenchRecord>, GeneratorError> {
    let per_graph: Vec<Vec<BenchRecord>> =
        plan.graphs.par_iter().map(|g| run_graph(plan, g)).collect::<Result<_, _>>()?;
    let mut records: Vec<BenchRecord> = per_graph.into_iter().flatten().collect();
    records.sort_by_key(|r| {
        let d = &r.instance;
        (d.node_count, d.connectivity_tier, d.seed, d.robot_count, r.algorithm)
    });
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tcgre_core::fixtures::t1;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>(), Ok(a));
        }
        assert!("dijkstra".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_solver_gets_t1_right() {
        let expected = [(Algorithm::JsgUcs, 3), (Algorithm::JsgAstar, 3), (Algorithm::Ces, 3), (Algorithm::RhocAstar, 3), (Algorithm::Naive, 11), (Algorithm::Oracle, 3)];
        for (algo, cost) in expected {
            let out = run_solver(&t1(), algo, &SolverOptions { k: 2, ..Default::default() });
            assert_eq!(out.result.unwrap().total_cost, Cost::new(cost), "{algo}");
        }
    }

    #[test]
    fn expired_budget_is_a_timeout() {
        let cfg = GeneratorConfig::new(20, tcgre_core::model::ConnectivityTier::Dense, 5, 1);
        let inst = generate_instance(&cfg).unwrap();
        let opts = SolverOptions { timeout: Duration::ZERO, ..Default::default() };
        assert_eq!(run_solver(&inst, Algorithm::JsgUcs, &opts).result.unwrap_err(), SolveError::Timeout);
    }
}
