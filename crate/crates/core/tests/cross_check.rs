//! Every solver against the brute-force oracle on small random instances.

mod common;

use common::tiny_suite;
use tcgre_core::ces::{
    build_coordination_set, cost_calculation, cost_calculation_bound, solve_ces, Assignment, CesConfig, IndividualCoordinationSet,
};
use tcgre_core::jsg::{search, solve_astar, solve_ucs, Heuristic, Pop, SearchLimits};
use tcgre_core::model::{validate_instance, validate_solution};
use tcgre_core::oracle::{oracle_solve, OracleLimits, OracleTable};
use tcgre_core::rhoc::{solve_rhoc, RhocConfig};
use tcgre_core::routing::{all_goal_distances, naive_solve, CostView};
use tcgre_core::Cost;

#[test]
fn search_costs_equal_the_oracle() {
    for (i, inst) in tiny_suite(120, 1000).into_iter().enumerate() {
        assert!(validate_instance(&inst).is_empty(), "instance {i}");
        let (_, oracle) = oracle_solve(&inst, &OracleLimits::default()).unwrap();
        let (ucs, ucs_stats) = solve_ucs(&inst).unwrap();
        let (astar, astar_stats) = solve_astar(&inst).unwrap();
        assert_eq!(ucs.total_cost, oracle, "ucs on instance {i}");
        assert_eq!(astar.total_cost, oracle, "astar on instance {i}");
        assert_eq!(validate_solution(&inst, &ucs), Ok(oracle));
        assert_eq!(validate_solution(&inst, &astar), Ok(oracle));
        assert!(astar_stats.states_expanded <= ucs_stats.states_expanded, "instance {i}");
        let bound = (inst.graph.node_count() as u64).pow(inst.robot_count() as u32);
        assert!(ucs_stats.states_generated <= bound);
    }
}

#[test]
fn heuristic_never_overestimates_on_popped_states() {
    for (i, inst) in tiny_suite(60, 2000).into_iter().enumerate() {
        let table = OracleTable::build(&inst, &OracleLimits::default()).unwrap();
        let mut checked = 0;
        let mut obs = |p: Pop<'_>| {
            let remaining = table.cost_to_go(p.locations).expect("popped states reach the goal");
            assert!(p.h <= remaining, "instance {i}: h {} > remaining {}", p.h, remaining);
            checked += 1;
        };
        search(&inst, Heuristic::Optimistic, &SearchLimits::default(), Some(&mut obs)).unwrap();
        assert!(checked > 0);
    }
}

#[test]
fn baselines_bracket_the_optimum() {
    for (i, inst) in tiny_suite(120, 3000).into_iter().enumerate() {
        let (_, oracle) = oracle_solve(&inst, &OracleLimits::default()).unwrap();
        let naive = naive_solve(&inst).unwrap();
        assert!(naive.total_cost >= oracle, "instance {i}");
        assert!(validate_solution(&inst, &naive).is_ok());
        let optimistic = all_goal_distances(&inst, CostView::optimistic(&inst));
        assert!(optimistic.joint(&inst.starts).unwrap() <= oracle, "instance {i}");
    }
}

#[test]
fn ces_is_sound_and_within_its_bound() {
    for (i, inst) in tiny_suite(120, 4000).into_iter().enumerate() {
        let (_, oracle) = oracle_solve(&inst, &OracleLimits::default()).unwrap();
        let naive = naive_solve(&inst).unwrap().total_cost;
        let (sol, counters) = solve_ces(&inst, &CesConfig::default()).unwrap();
        assert_eq!(validate_solution(&inst, &sol), Ok(sol.total_cost), "instance {i}");
        assert!(sol.total_cost >= oracle && sol.total_cost <= naive, "instance {i}");
        let pairs = inst.graph.support_pair_count();
        assert!(counters.cost_calculations as f64 <= cost_calculation_bound(inst.robot_count(), pairs));
    }
}

/// Cheapest plan over every sequence of distinct support pairs and every
/// robot pair and direction per element, priced one by one.
fn ces_brute_force(inst: &tcgre_core::ProblemInstance) -> Cost {
    fn go(inst: &tcgre_core::ProblemInstance, used: &mut Vec<bool>, order: &mut Vec<Assignment>, best: &mut Cost) {
        let robots = inst.robot_count();
        let ics = IndividualCoordinationSet::new(robots, order.clone());
        if let Ok((_, c)) = cost_calculation(inst, &ics) {
            *best = (*best).min(c);
        }
        let pairs = build_coordination_set(inst);
        for (p, pair) in pairs.iter().enumerate() {
            if used[p] {
                continue;
            }
            used[p] = true;
            let (lo, hi) = pair.edge.endpoints();
            for receiver in 0..robots {
                for supporter in (0..robots).filter(|&s| s != receiver) {
                    for (from, to) in [(lo, hi), (hi, lo)] {
                        order.push(Assignment { receiver, supporter, from, to, support_node: pair.support_node });
                        go(inst, used, order, best);
                        order.pop();
                    }
                }
            }
            used[p] = false;
        }
    }
    let mut best = naive_solve(inst).unwrap().total_cost;
    go(inst, &mut vec![false; build_coordination_set(inst).len()], &mut Vec::new(), &mut best);
    best
}

#[test]
fn ces_pruning_keeps_the_enumeration_minimum() {
    let mut pruned_somewhere = false;
    for (i, inst) in tiny_suite(150, 4500).into_iter().enumerate() {
        let (sol, counters) = solve_ces(&inst, &CesConfig::default()).unwrap();
        assert_eq!(sol.total_cost, ces_brute_force(&inst), "instance {i}");
        assert_eq!(counters.assignments_visited, counters.cost_calculations + counters.assignments_pruned, "instance {i}");
        pruned_somewhere |= counters.assignments_pruned > 0;
    }
    assert!(pruned_somewhere);
}

#[test]
fn ces_separation_identity() {
    for inst in tiny_suite(80, 5000) {
        let (sol, _) = solve_ces(&inst, &CesConfig::default()).unwrap();
        let g = &inst.graph;
        let mut moved = Cost::ZERO;
        for path in &sol.paths {
            for w in path.windows(2) {
                if w[0] != w[1] {
                    moved += g.base_cost(w[0], w[1]).unwrap();
                }
            }
        }
        let reduction: Cost = sol
            .events
            .iter()
            .map(|e| inst.coordination_gain(g.edge_index(e.edge[0], e.edge[1]).unwrap()).unwrap())
            .sum();
        assert_eq!(sol.total_cost, moved - reduction);
    }
}

#[test]
fn rhoc_is_feasible_and_never_beats_the_optimum() {
    for (i, inst) in tiny_suite(90, 6000).into_iter().enumerate() {
        let (_, oracle) = oracle_solve(&inst, &OracleLimits::default()).unwrap();
        for k in 1..=4 {
            let (sol, _) = solve_rhoc(&inst, &RhocConfig::new(k)).unwrap();
            assert_eq!(validate_solution(&inst, &sol), Ok(sol.total_cost), "instance {i}, K = {k}");
            assert!(sol.total_cost >= oracle, "instance {i}, K = {k}");
        }
    }
}

/// Every pair segment of at most `k` steps without joint waiting, stopping
/// early once both robots are home: (end locations, steps, cost).
fn pair_segments(inst: &tcgre_core::ProblemInstance, k: usize) -> Vec<(Vec<usize>, usize, Cost)> {
    use tcgre_core::jsg::min_transition_cost;
    use tcgre_core::model::JointState;
    let mut out = Vec::new();
    let mut stack = vec![(inst.starts.clone(), 0usize, Cost::ZERO)];
    while let Some((locs, depth, cost)) = stack.pop() {
        if locs == inst.goals || depth == k {
            out.push((locs, depth, cost));
            continue;
        }
        let opts = |l: usize| -> Vec<usize> {
            std::iter::once(l).chain(inst.graph.neighbors(l).iter().map(|nb| nb.node)).collect()
        };
        for a in opts(locs[0]) {
            for b in opts(locs[1]) {
                let next = vec![a, b];
                if next == locs {
                    continue;
                }
                let (c, _) = min_transition_cost(inst, &JointState(locs.clone()), &JointState(next.clone()));
                stack.push((next, depth + 1, cost + c));
            }
        }
    }
    out
}

#[test]
fn rhoc_pair_window_is_locally_optimal() {
    use tcgre_core::rhoc::plan_pair_window;
    for seed in 0..60u64 {
        let nodes = 2 + (seed as usize % 4);
        let inst = common::tiny_instance(8000 + seed, nodes, 2, 2);
        let h = all_goal_distances(&inst, CostView::optimistic(&inst));
        for k in 1..=3 {
            let w = plan_pair_window(&inst, (0, 1), (inst.starts[0], inst.starts[1]), k, &h);
            let segments = pair_segments(&inst, k);
            let h_start = h.joint(&inst.starts).unwrap();
            let score = |s: &(Vec<usize>, usize, Cost)| s.2 + h.joint(&s.0).unwrap();
            let progresses = |s: &(Vec<usize>, usize, Cost)| {
                let end = h.joint(&s.0).unwrap();
                let home = |l: &[usize]| (0..2).filter(|&i| l[i] == inst.goals[i]).count();
                end < h_start || (end == h_start && home(&s.0) > home(&inst.starts))
            };
            let best = segments.iter().map(score).min().unwrap();
            let chosen = w.cost + w.end_h;
            if chosen != best {
                assert!(segments.iter().filter(|s| score(s) == best).all(|s| !progresses(s)), "seed {seed}, K = {k}");
                let best_progressing = segments.iter().filter(|s| progresses(s)).map(score).min();
                assert_eq!(Some(chosen), best_progressing, "seed {seed}, K = {k}");
            }
        }
    }
}
