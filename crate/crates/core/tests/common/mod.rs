#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcgre_core::model::{Edge, Graph, RiskyEdge};
use tcgre_core::{Cost, ProblemInstance};

/// Connected random instance: a random spanning tree plus extra edges, up to
/// `max_risky` risky edges with one or two support nodes each.
pub fn tiny_instance(seed: u64, nodes: usize, robots: usize, max_risky: usize) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = Vec::new();
    for v in 1..nodes {
        keys.push((rng.gen_range(0..v), v));
    }
    for u in 0..nodes {
        for v in u + 1..nodes {
            if !keys.contains(&(u, v)) && rng.gen_bool(0.3) {
                keys.push((u, v));
            }
        }
    }
    let mut edges: Vec<Edge> = keys.iter().map(|&(u, v)| Edge::new(u, v, Cost::new(rng.gen_range(1..=4)))).collect();

    let mut risky = Vec::new();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let wanted = rng.gen_range(0..=max_risky);
    for &i in order.iter().take(wanted) {
        let (u, v) = edges[i].key.endpoints();
        let others: Vec<usize> = (0..nodes).filter(|&n| n != u && n != v).collect();
        if others.is_empty() {
            continue;
        }
        edges[i].cost = Cost::new(rng.gen_range(6..=14));
        let count = rng.gen_range(1..=2.min(others.len()));
        let support: Vec<usize> = others.choose_multiple(&mut rng, count).copied().collect();
        risky.push(RiskyEdge::new(u, v, Cost::new(rng.gen_range(1..=3)), support));
    }

    let starts = (0..robots).map(|_| rng.gen_range(0..nodes)).collect();
    let goals = (0..robots).map(|_| rng.gen_range(0..nodes)).collect();
    ProblemInstance::new(Graph::new(nodes, edges, risky), starts, goals, Cost::new(rng.gen_range(0..=2)))
}

/// Deterministic sweep of small shapes: node count 2..=6, robots 1..=3.
pub fn tiny_suite(count: usize, base_seed: u64) -> Vec<ProblemInstance> {
    (0..count)
        .map(|i| {
            let seed = base_seed + i as u64;
            let nodes = 2 + (i % 5);
            let robots = 1 + (i / 5) % 3;
            tiny_instance(seed, nodes, robots, 2)
        })
        .collect()
}
