mod common;

use dea_bench::milp::{solve_milp, MilpStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn branch_and_bound_matches_every_fixing() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..40 {
        let k = rng.gen_range(1..=8);
        let p = common::random_milp(&mut rng, k);
        let sol = solve_milp(&p).unwrap();
        match common::exhaustive_optimum(&p) {
            Some(best) => {
                assert_eq!(sol.status, MilpStatus::Optimal, "case {case}");
                assert!(
                    (sol.objective - best).abs() <= 1e-6,
                    "case {case}: {} vs {best}",
                    sol.objective
                );
                assert!(
                    p.violations(&sol.x).iter().all(|v| *v <= 1e-7),
                    "case {case}"
                );
                assert!(sol.max_bound_regression <= 1e-7, "case {case}");
            }
            None => assert_eq!(sol.status, MilpStatus::Infeasible, "case {case}"),
        }
    }
}
