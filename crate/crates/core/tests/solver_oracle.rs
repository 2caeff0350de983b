mod common;

use common::{enumerate_milp, random_milp};
use flexhand_core::solver::{parse_lp_str, solve_milp, write_lp_string, SolveStatus, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> SolverConfig {
    SolverConfig::default().with_gap(1e-9)
}

#[test]
fn random_milps_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..60 {
        let nbin = rng.gen_range(1..=10);
        let ncont = rng.gen_range(0..=6);
        let (milp, obj) = random_milp(&mut rng, nbin, ncont);
        let res = solve_milp(&milp, &obj, &config());
        match enumerate_milp(&milp, &obj) {
            Some(best) => {
                assert_eq!(res.status, SolveStatus::Optimal, "case {case}");
                assert!((res.objective_value - best).abs() <= 1e-6, "case {case}: {} vs {best}", res.objective_value);
                assert!(milp.violations(&res.assignment.0, 1e-7).is_empty(), "case {case}");
            }
            None => assert_eq!(res.status, SolveStatus::Infeasible, "case {case}"),
        }
    }
}

#[test]
fn node_bounds_are_monotone_and_replay_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (milp, obj) = random_milp(&mut rng, 8, 4);
        let a = solve_milp(&milp, &obj, &config());
        let b = solve_milp(&milp, &obj, &config());
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.assignment, b.assignment);
        for rec in &a.stats.node_log {
            if let Some(z) = rec.lp_bound {
                assert!(z >= rec.parent_bound - 1e-7, "node {} bound {} below parent {}", rec.id, z, rec.parent_bound);
            }
        }
        if a.status == SolveStatus::Optimal {
            assert!(a.best_bound <= a.objective_value + 1e-12);
            assert!((a.objective_value - a.best_bound).abs() <= 1e-9 * a.objective_value.abs().max(1.0));
        }
    }
}

#[test]
fn exported_lp_reparses_to_same_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let (milp, obj) = random_milp(&mut rng, 5, 3);
        let text = write_lp_string(&milp, &obj);
        let parsed = parse_lp_str(&text).unwrap();
        assert_eq!(parsed.milp.vars.len(), milp.vars.len());
        assert_eq!(parsed.milp.rows.len(), milp.rows.len());
        let a = solve_milp(&milp, &obj, &config());
        let b = solve_milp(&parsed.milp, &parsed.objective, &config());
        assert_eq!(a.status, b.status);
        if a.status == SolveStatus::Optimal {
            assert!((a.objective_value - b.objective_value).abs() < 1e-9);
        }
    }
}
