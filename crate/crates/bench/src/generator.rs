//! Seeded random instances in the shape of the benchmark suite.
//!
//! A graph starts as a random spanning tree over a shuffled node order and
//! then gains extra edges according to its connectivity tier. Some edges
//! are made risky, each with a few support nodes away from its endpoints.
//! The team is placed last, from the same random stream, so configurations
//! that differ only in the robot count share the same graph.

use itertools::iproduct;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tcgre_core::model::{ConnectivityTier, Edge, Graph, RiskyEdge};
use tcgre_core::{Cost, ProblemInstance};

/// How many edges become risky.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskySelection {
    /// Share of all edges, rounded to the nearest count.
    Fraction(f64),
    /// Exact number of edges.
    Count(usize),
}

/// Edge-density knobs of the three connectivity tiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierParams {
    /// Sparse graphs get this many extra edges per node on top of the tree.
    pub sparse_extra_per_node: f64,
    /// Moderate graphs use edge probability `scale * ln|V| / |V|`.
    pub moderate_scale: f64,
    pub dense_probability: f64,
}

impl Default for TierParams {
    fn default() -> Self {
        TierParams { sparse_extra_per_node: 0.05, moderate_scale: 2.0, dense_probability: 0.5 }
    }
}

/// Inclusive integer range that a cost is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRange {
    pub lo: i64,
    pub hi: i64,
}

impl CostRange {
    pub const fn new(lo: i64, hi: i64) -> Self {
        CostRange { lo, hi }
    }

    fn is_valid(self) -> bool {
        0 <= self.lo && self.lo <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub node_count: usize,
    pub tier: ConnectivityTier,
    pub risky: RiskySelection,
    pub support_nodes_per_edge: usize,
    pub robots: usize,
    pub base_cost: CostRange,
    pub risky_base_cost: CostRange,
    pub reduced_cost: CostRange,
    pub supporter_cost: i64,
    pub tier_params: TierParams,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Default costs and tier parameters, two risky edges with one support
    /// node each.
    pub fn new(node_count: usize, tier: ConnectivityTier, robots: usize, seed: u64) -> Self {
        GeneratorConfig {
            node_count,
            tier,
            risky: RiskySelection::Count(2),
            support_nodes_per_edge: 1,
            robots,
            base_cost: CostRange::new(1, 10),
            risky_base_cost: CostRange::new(20, 100),
            reduced_cost: CostRange::new(1, 5),
            supporter_cost: 2,
            tier_params: TierParams::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{robots} robots cannot have distinct starts on {nodes} nodes")]
    TooManyRobots { robots: usize, nodes: usize },
    #[error("risky fraction {0} must lie in [0, 1)")]
    BadFraction(f64),
    #[error("risky fraction {fraction} of {edges} edges rounds to no risky edge")]
    NoRiskyEdges { fraction: f64, edges: usize },
    #[error("asked for {wanted} risky edges but the graph has only {edges} edges")]
    TooManyRiskyEdges { wanted: usize, edges: usize },
    #[error("{wanted} support nodes per edge need at least {} nodes", .wanted + 2)]
    TooManySupportNodes { wanted: usize },
    #[error("invalid {0} cost range")]
    BadCostRange(&'static str),
}

fn check(cfg: &GeneratorConfig) -> Result<(), GeneratorError> {
    let n = cfg.node_count;
    if n < 2 {
        return Err(GeneratorError::TooFewNodes(n));
    }
    if cfg.robots > n {
        return Err(GeneratorError::TooManyRobots { robots: cfg.robots, nodes: n });
    }
    if let RiskySelection::Fraction(f) = cfg.risky {
        if !(0.0..1.0).contains(&f) {
            return Err(GeneratorError::BadFraction(f));
        }
    }
    let wants_risky = match cfg.risky {
        RiskySelection::Fraction(f) => f > 0.0,
        RiskySelection::Count(c) => c > 0,
    };
    if wants_risky && (cfg.support_nodes_per_edge == 0 || cfg.support_nodes_per_edge + 2 > n) {
        return Err(GeneratorError::TooManySupportNodes { wanted: cfg.support_nodes_per_edge });
    }
    for (name, range) in [("base", cfg.base_cost), ("risky base", cfg.risky_base_cost), ("reduced", cfg.reduced_cost)] {
        if !range.is_valid() {
            return Err(GeneratorError::BadCostRange(name));
        }
    }
    if cfg.reduced_cost.lo > cfg.risky_base_cost.hi {
        return Err(GeneratorError::BadCostRange("reduced"));
    }
    if cfg.supporter_cost < 0 {
        return Err(GeneratorError::BadCostRange("supporter"));
    }
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, range: CostRange) -> i64 {
    rng.gen_range(range.lo..=range.hi)
}

fn topology(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = cfg.node_count;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut adjacent = vec![vec![false; n]; n];
    let mut pairs = Vec::with_capacity(n);
    let mut link = |u: usize, v: usize, adjacent: &mut Vec<Vec<bool>>| {
        adjacent[u][v] = true;
        adjacent[v][u] = true;
        pairs.push((u.min(v), u.max(v)));
    };
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        link(order[i], parent, &mut adjacent);
    }

    let free: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !adjacent[u][v]).collect();
    let p = cfg.tier_params;
    match cfg.tier {
        ConnectivityTier::Sparse => {
            let extra = ((p.sparse_extra_per_node * n as f64).round() as usize).min(free.len());
            for i in sample(rng, free.len(), extra).into_vec() {
                let (u, v) = free[i];
                link(u, v, &mut adjacent);
            }
        }
        ConnectivityTier::Moderate | ConnectivityTier::Dense => {
            let prob = match cfg.tier {
                ConnectivityTier::Moderate => p.moderate_scale * (n as f64).ln() / n as f64,
                _ => p.dense_probability,
            }
            .clamp(0.0, 1.0);
            for &(u, v) in &free {
                if rng.gen_bool(prob) {
                    link(u, v, &mut adjacent);
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Builds the instance described by `cfg`. The same config always yields the
/// same instance.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<ProblemInstance, GeneratorError> {
    check(cfg)?;
    let n = cfg.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs = topology(cfg, &mut rng);

    let risky_count = match cfg.risky {
        RiskySelection::Count(c) => c,
        RiskySelection::Fraction(f) => {
            let c = (f * pairs.len() as f64).round() as usize;
            if f > 0.0 && c == 0 {
                return Err(GeneratorError::NoRiskyEdges { fraction: f, edges: pairs.len() });
            }
            c
        }
    };
    if risky_count > pairs.len() {
        return Err(GeneratorError::TooManyRiskyEdges { wanted: risky_count, edges: pairs.len() });
    }
    let mut is_risky = vec![false; pairs.len()];
    for i in sample(&mut rng, pairs.len(), risky_count).into_vec() {
        is_risky[i] = true;
    }

    let mut edges = Vec::with_capacity(pairs.len());
    let mut risky = Vec::with_capacity(risky_count);
    for (&(u, v), &r) in pairs.iter().zip(&is_risky) {
        if !r {
            edges.push(Edge::new(u, v, Cost::new(draw(&mut rng, cfg.base_cost))));
            continue;
        }
        let base = draw(&mut rng, cfg.risky_base_cost);
        let reduced = rng.gen_range(cfg.reduced_cost.lo..=cfg.reduced_cost.hi.min(base));
        let others: Vec<usize> = (0..n).filter(|&x| x != u && x != v).collect();
        let mut support: Vec<usize> =
            sample(&mut rng, others.len(), cfg.support_nodes_per_edge).into_iter().map(|i| others[i]).collect();
        support.sort_unstable();
        edges.push(Edge::new(u, v, Cost::new(base)));
        risky.push(RiskyEdge::new(u, v, Cost::new(reduced), support));
    }

    let starts = sample(&mut rng, n, cfg.robots).into_vec();
    let goals = loop {
        let goals = sample(&mut rng, n, cfg.robots).into_vec();
        if goals.iter().zip(&starts).all(|(g, s)| g != s) {
            break goals;
        }
    };
    Ok(ProblemInstance::new(Graph::new(n, edges, risky), starts, goals, Cost::new(cfg.supporter_cost)))
}

/// Graph configurations of the benchmark suite: every node count and tier,
/// once per seed. Robot counts are filled in later.
pub fn suite_configs(node_counts: &[usize], tiers: &[ConnectivityTier], seeds: &[u64]) -> Vec<GeneratorConfig> {
    iproduct!(node_counts, tiers, seeds).map(|(&n, &tier, &seed)| GeneratorConfig::new(n, tier, 0, seed)).collect()
}

/// 5 node counts, 3 tiers and 3 seeds: 45 graphs.
pub fn paper_suite(base_seed: u64) -> Vec<GeneratorConfig> {
    suite_configs(&[10, 15, 20, 25, 30], &ConnectivityTier::ALL, &[base_seed, base_seed + 1, base_seed + 2])
}

/// Configuration of a small random instance that the brute-force oracle can
/// still handle: 3 to 6 nodes, 1 to 3 robots, at most 2 risky edges.
pub fn tiny_config(seed: u64) -> GeneratorConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7111);
    let nodes = rng.gen_range(3..=6);
    let tier = ConnectivityTier::ALL[rng.gen_range(0..3)];
    let mut cfg = GeneratorConfig::new(nodes, tier, rng.gen_range(1..=3), seed);
    cfg.risky = RiskySelection::Count(rng.gen_range(0..=2));
    cfg.support_nodes_per_edge = rng.gen_range(1..=(nodes - 2).min(2));
    cfg.base_cost = CostRange::new(1, 4);
    cfg.risky_base_cost = CostRange::new(6, 14);
    cfg.reduced_cost = CostRange::new(1, 3);
    cfg.supporter_cost = rng.gen_range(0..=2);
    cfg
}

/// Builds a tiny instance, dropping the risky edges when the drawn graph has
/// too few edges for them.
pub fn tiny_instance_from(mut cfg: GeneratorConfig) -> ProblemInstance {
    loop {
        match generate_instance(&cfg) {
            Ok(inst) => return inst,
            Err(GeneratorError::TooManyRiskyEdges { .. }) => cfg.risky = RiskySelection::Count(0),
            Err(e) => panic!("tiny config {cfg:?} is invalid: {e}"),
        }
    }
}

pub fn tiny_instance(seed: u64) -> ProblemInstance {
    tiny_instance_from(tiny_config(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tcgre_core::model::io::write_instance;
    use tcgre_core::model::validate_instance;

    #[test]
    fn same_config_same_bytes() {
        let cfg = GeneratorConfig::new(10, ConnectivityTier::Sparse, 3, 7);
        let a = write_instance(&generate_instance(&cfg).unwrap());
        let b = write_instance(&generate_instance(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_are_valid_and_connected() {
        for cfg in paper_suite(1) {
            for robots in [3, 7] {
                let inst = generate_instance(&GeneratorConfig { robots, ..cfg.clone() }).unwrap();
                assert!(validate_instance(&inst).is_empty(), "{cfg:?}");
                assert!(inst.graph.is_connected());
                assert_eq!(inst.graph.risky_edges().len(), 2);
                assert_eq!(inst.graph.support_pair_count(), 2);
            }
        }
    }

    #[test]
    fn team_size_does_not_change_the_graph() {
        let cfg = GeneratorConfig::new(15, ConnectivityTier::Moderate, 3, 11);
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&GeneratorConfig { robots: 6, ..cfg }).unwrap();
        assert_eq!(a.graph, b.graph);
    }

    #[test]
    fn starts_and_goals_are_distinct() {
        let inst = generate_instance(&GeneratorConfig::new(10, ConnectivityTier::Dense, 7, 3)).unwrap();
        let mut s = inst.starts.clone();
        let mut g = inst.goals.clone();
        s.sort_unstable();
        s.dedup();
        g.sort_unstable();
        g.dedup();
        assert_eq!((s.len(), g.len()), (7, 7));
        assert!(inst.starts.iter().zip(&inst.goals).all(|(a, b)| a != b));
    }

    #[test]
    fn tiers_order_edge_counts() {
        let count = |tier| generate_instance(&GeneratorConfig::new(30, tier, 3, 5)).unwrap().graph.edges().len();
        let (s, m, d) = (count(ConnectivityTier::Sparse), count(ConnectivityTier::Moderate), count(ConnectivityTier::Dense));
        assert_eq!(s, 29 + 2);
        assert!(s < m && m < d, "{s} {m} {d}");
    }

    #[test]
    fn infeasible_configs_are_reported() {
        let mut cfg = GeneratorConfig::new(10, ConnectivityTier::Sparse, 3, 1);
        cfg.risky = RiskySelection::Fraction(0.01);
        assert!(matches!(generate_instance(&cfg), Err(GeneratorError::NoRiskyEdges { .. })));
        cfg.risky = RiskySelection::Count(500);
        assert!(matches!(generate_instance(&cfg), Err(GeneratorError::TooManyRiskyEdges { .. })));
        cfg.risky = RiskySelection::Count(1);
        cfg.robots = 11;
        assert!(matches!(generate_instance(&cfg), Err(GeneratorError::TooManyRobots { .. })));
    }

    #[test]
    fn paper_suite_has_45_graphs() {
        assert_eq!(paper_suite(1).len(), 45);
    }

    #[test]
    fn tiny_instances_fit_the_oracle() {
        for seed in 0..100 {
            let inst = tiny_instance(seed);
            assert!(inst.graph.node_count() <= 6 && inst.robot_count() <= 3);
            assert!(inst.graph.risky_edges().len() <= 2);
            assert!(validate_instance(&inst).is_empty());
        }
    }
}
