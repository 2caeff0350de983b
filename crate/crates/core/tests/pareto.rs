mod common;

use common::{brute_force_nondominated, enumerate_objectives, random_biobjective};
use flexhand_core::model::{Assignment, FlatExpr, FlatMilp, FlatRow, FlatVar, Sense, Stage, StageScope, VarKind};
use flexhand_core::pareto::{dominance_filter, generate_front, FrontKind, ParetoPoint};
use flexhand_core::solver::{Solver, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solver() -> Solver {
    Solver::new(SolverConfig::default().with_gap(1e-9))
}

fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn filter_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let pts: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let points = pts
            .iter()
            .map(|o| ParetoPoint { objectives: o.clone(), assignment: Assignment::default(), scenario_id: "s".into() })
            .collect();
        let f = dominance_filter(points, FrontKind::Ideal);
        assert_eq!(f.objective_vectors(), sorted(brute_force_nondominated(&pts)));
    }
}

#[test]
fn knapsack_front_has_the_three_efficient_points() {
    // items (value, weight): a = (3, 2), b = (2, 2); f1 = -value, f2 = weight
    let vars = ["a", "b"]
        .iter()
        .map(|n| FlatVar { name: n.to_string(), stage: Stage::First, kind: VarKind::Binary, lower: 0.0, upper: 1.0 })
        .collect();
    let milp = FlatMilp {
        scenario: "s".into(),
        vars,
        rows: vec![],
        objectives: vec![
            FlatExpr { coeffs: vec![(0, -3.0), (1, -2.0)], constant: 0.0 },
            FlatExpr { coeffs: vec![(0, 2.0), (1, 2.0)], constant: 0.0 },
        ],
        objective_names: vec!["value".into(), "weight".into()],
    };
    let expected = sorted(brute_force_nondominated(&enumerate_objectives(&milp)));
    assert_eq!(expected.len(), 3);
    let f = generate_front(&milp, 5, &solver(), FrontKind::Ideal).unwrap();
    assert_eq!(f.objective_vectors(), expected);
}

#[test]
fn large_resolution_recovers_every_efficient_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let milp = random_biobjective(&mut rng, 7);
        let expected = sorted(brute_force_nondominated(&enumerate_objectives(&milp)));
        let f = generate_front(&milp, 200, &solver(), FrontKind::Ideal).unwrap();
        assert_eq!(f.objective_vectors(), expected);
        for p in &f.points {
            assert_eq!(milp.objective_values(&p.assignment.0), p.objectives);
        }
    }
}

#[test]
fn generated_points_are_efficient_and_capped() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n_target in [2, 3, 5] {
        let milp = random_biobjective(&mut rng, 8);
        let all = enumerate_objectives(&milp);
        let f = generate_front(&milp, n_target, &solver(), FrontKind::Ideal).unwrap();
        assert!(f.len() <= n_target + 2 && !f.is_empty());
        for p in f.objective_vectors() {
            let dominated = all.iter().any(|q| q[0] <= p[0] && q[1] <= p[1] && (q[0] < p[0] - 1e-6 || q[1] < p[1] - 1e-6));
            assert!(!dominated, "{p:?} is dominated");
        }
    }
}

#[test]
fn three_objective_front_is_efficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut milp = random_biobjective(&mut rng, 7);
    milp.objectives.push(FlatExpr { coeffs: (0..7).map(|j| (j, rng.gen_range(-9..=9) as f64)).collect(), constant: 0.0 });
    milp.objective_names.push("f3".into());
    milp.rows.push(FlatRow { name: "min".into(), coeffs: (0..7).map(|j| (j, 1.0)).collect(), sense: Sense::Ge, rhs: 1.0, scope: StageScope::Coupled });
    let all = enumerate_objectives(&milp);
    let efficient = brute_force_nondominated(&all);
    let f = generate_front(&milp, 8, &solver(), FrontKind::Ideal).unwrap();
    assert!(f.len() >= 3 && f.len() <= 8 + 3);
    for p in f.objective_vectors() {
        assert!(efficient.contains(&p), "{p:?} not efficient");
    }
}
