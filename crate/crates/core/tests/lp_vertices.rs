mod common;

use dea_bench::lp::{solve_lp, LpStatus};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = common::random_lp(&mut rng);
        let sol = solve_lp(&lp).unwrap();
        match common::vertex_optimum(&lp) {
            Some(best) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - best).abs() <= 1e-6 * best.abs().max(1.0),
                    "simplex {} vs vertices {}", sol.objective, best);
                prop_assert!(lp.max_row_violation(&sol.x) <= 1e-7);
                prop_assert!(lp.max_bound_violation(&sol.x) <= 1e-7);
            }
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn warm_start_from_own_basis_is_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lp = common::random_lp(&mut rng);
        let cold = solve_lp(&lp).unwrap();
        if let Some(basis) = &cold.basis {
            let warm = dea_bench::lp::solve_lp_warm(&lp, basis).unwrap();
            prop_assert_eq!(warm.status, LpStatus::Optimal);
            prop_assert!((warm.objective - cold.objective).abs() <= 1e-9 * cold.objective.abs().max(1.0));
        }
    }
}
