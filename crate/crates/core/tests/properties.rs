mod common;

use common::tiny_instance;
use proptest::prelude::*;
use tcgre_core::ces::{solve_ces, CesConfig};
use tcgre_core::jsg::solve_astar;
use tcgre_core::model::io::{read_instance, read_solution, write_instance, write_solution};
use tcgre_core::model::validate_solution;
use tcgre_core::rhoc::{solve_rhoc, RhocConfig};
use tcgre_core::routing::naive_solve;
use tcgre_core::Cost;

fn instance() -> impl Strategy<Value = tcgre_core::ProblemInstance> {
    (any::<u64>(), 2usize..=6, 1usize..=3, 0usize..=2).prop_map(|(seed, n, r, risky)| tiny_instance(seed, n, r, risky))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn costs_survive_a_text_round_trip(micros in -1_000_000_000i64..1_000_000_000) {
        let c = Cost::try_from_f64(micros as f64 / 1e6).unwrap();
        prop_assert_eq!(Cost::try_from_f64(c.to_f64()).unwrap(), c);
    }

    #[test]
    fn instances_survive_a_file_round_trip(inst in instance()) {
        let text = write_instance(&inst);
        prop_assert_eq!(read_instance(&text).unwrap(), inst.clone());
        prop_assert_eq!(write_instance(&read_instance(&text).unwrap()), text);
    }

    #[test]
    fn solver_costs_are_ordered(inst in instance()) {
        let naive = naive_solve(&inst).unwrap();
        let (optimal, _) = solve_astar(&inst).unwrap();
        let (ces, _) = solve_ces(&inst, &CesConfig::default()).unwrap();
        let (rhoc, _) = solve_rhoc(&inst, &RhocConfig::new(3)).unwrap();
        prop_assert!(optimal.total_cost <= ces.total_cost);
        prop_assert!(ces.total_cost <= naive.total_cost);
        prop_assert!(optimal.total_cost <= rhoc.total_cost);
        for sol in [&naive, &optimal, &ces, &rhoc] {
            prop_assert_eq!(validate_solution(&inst, sol), Ok(sol.total_cost));
            prop_assert_eq!(&read_solution(&write_solution(sol)).unwrap(), sol);
        }
    }
}
