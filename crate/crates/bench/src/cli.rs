//! The `tcgre` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use tcgre_core::model::io::{read_instance, read_solution, write_instance, write_solution};
use tcgre_core::model::{validate_solution, ConnectivityTier};
use tcgre_core::{ProblemInstance, SolveError};

use crate::generator::{generate_instance, suite_configs, GeneratorConfig, RiskySelection};
use crate::report::emit_reports;
use crate::runner::{run_bench, run_solver, Algorithm, BenchPlan, SolverOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "tcgre", version, about = "Team coordination planning on graphs with risky edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Solve an instance and write the plan.
    Solve(SolveArgs),
    /// Check a plan against an instance and print its cost.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Run a benchmark suite and write CSV and plots.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    #[arg(long, default_value = "sparse")]
    tier: ConnectivityTier,
    #[arg(long, default_value_t = 3)]
    robots: usize,
    /// Share of edges that are risky.
    #[arg(long, conflicts_with = "risky_edges")]
    risky_fraction: Option<f64>,
    /// Exact number of risky edges (default 2).
    #[arg(long)]
    risky_edges: Option<usize>,
    #[arg(long, default_value_t = 1)]
    support_nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::JsgAstar)]
    algo: Algorithm,
    /// Window length for rhoc-astar.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// How often ces may use each support pair.
    #[arg(long, default_value_t = 1)]
    max_uses: usize,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Solution file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Suite description in TOML; the built-in 45-graph suite when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict to these algorithms (repeatable).
    #[arg(long, value_enum)]
    algo: Vec<Algorithm>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    max_uses: Option<usize>,
    /// Per-run budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// First graph seed; the suite uses consecutive seeds from here.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for results.csv and the plots.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Report each run on standard error as it finishes.
    #[arg(long)]
    progress: bool,
}

/// Benchmark suite as read from a TOML file. Missing keys take the values of
/// the built-in suite.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub node_counts: Vec<usize>,
    pub tiers: Vec<ConnectivityTier>,
    pub seeds: Vec<u64>,
    pub team_sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub timeout_s: f64,
    pub k: usize,
    pub max_uses: usize,
    pub risky_edges: usize,
    pub support_nodes_per_edge: usize,
    pub skip_exact_after_failure: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            node_counts: vec![10, 15, 20, 25, 30],
            tiers: ConnectivityTier::ALL.to_vec(),
            seeds: vec![1, 2, 3],
            team_sizes: vec![3, 4, 5, 6, 7],
            algorithms: Algorithm::COMPARED.to_vec(),
            timeout_s: 60.0,
            k: 3,
            max_uses: 1,
            risky_edges: 2,
            support_nodes_per_edge: 1,
            skip_exact_after_failure: true,
        }
    }
}

impl SuiteConfig {
    pub fn plan(&self) -> BenchPlan {
        let graphs = suite_configs(&self.node_counts, &self.tiers, &self.seeds)
            .into_iter()
            .map(|g| GeneratorConfig {
                risky: RiskySelection::Count(self.risky_edges),
                support_nodes_per_edge: self.support_nodes_per_edge,
                ..g
            })
            .collect();
        BenchPlan {
            graphs,
            team_sizes: self.team_sizes.clone(),
            algorithms: self.algorithms.clone(),
            options: SolverOptions {
                k: self.k,
                max_uses: self.max_uses,
                timeout: Duration::from_secs_f64(self.timeout_s),
                ..Default::default()
            },
            skip_exact_after_failure: self.skip_exact_after_failure,
            progress: false,
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<SolveError>() {
                Some(SolveError::Timeout | SolveError::ResourceLimit { .. }) => EXIT_RESOURCE,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_instance(&text).with_context(|| format!("bad instance file {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Generate(a) => {
            let mut cfg = GeneratorConfig::new(a.nodes, a.tier, a.robots, a.seed);
            cfg.support_nodes_per_edge = a.support_nodes;
            if let Some(f) = a.risky_fraction {
                cfg.risky = RiskySelection::Fraction(f);
            }
            if let Some(c) = a.risky_edges {
                cfg.risky = RiskySelection::Count(c);
            }
            let inst = generate_instance(&cfg)?;
            emit(&write_instance(&inst), a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Solve(a) => {
            let inst = load_instance(&a.instance)?;
            let opts = SolverOptions {
                k: a.k,
                max_uses: a.max_uses,
                timeout: Duration::try_from_secs_f64(a.timeout).context("--timeout must be a non-negative number")?,
                ..Default::default()
            };
            let outcome = run_solver(&inst, a.algo, &opts);
            let sol = outcome.result?;
            if let Some(path) = &a.out {
                emit(&write_solution(&sol), Some(path))?;
            }
            println!("cost {}", sol.total_cost);
            eprintln!("runtime {:.6} s", outcome.runtime.as_secs_f64());
            Ok(EXIT_OK)
        }
        Command::Verify { instance, solution } => {
            let inst = load_instance(&instance)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("cannot read {}", solution.display()))?;
            let sol = read_solution(&text).with_context(|| format!("bad solution file {}", solution.display()))?;
            match validate_solution(&inst, &sol) {
                Ok(cost) => {
                    println!("{cost}");
                    Ok(EXIT_OK)
                }
                Err(violations) => {
                    for v in violations {
                        println!("violation: {v}");
                    }
                    Ok(EXIT_INVALID)
                }
            }
        }
        Command::Bench(a) => {
            let mut suite = match &a.config {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                    toml::from_str(&text).with_context(|| format!("bad suite file {}", path.display()))?
                }
                None => SuiteConfig::default(),
            };
            if !a.algo.is_empty() {
                suite.algorithms = a.algo;
            }
            if let Some(k) = a.k {
                suite.k = k;
            }
            if let Some(m) = a.max_uses {
                suite.max_uses = m;
            }
            if let Some(t) = a.timeout {
                suite.timeout_s = t;
            }
            if let Some(s) = a.seed {
                suite.seeds = (s..).take(suite.seeds.len()).collect();
            }
            let plan = BenchPlan { progress: a.progress, ..suite.plan() };
            let records = run_bench(&plan)?;
            let files = emit_reports(&records, &a.out)?;
            let done = records.iter().filter(|r| !r.timeout).count();
            println!("{} runs, {done} completed, results in {}", records.len(), files.csv.display());
            Ok(EXIT_OK)
        }
    }
}
