//! Test-only oracles, independent of the code paths they check.
#![allow(dead_code)]

use flexhand_core::model::{FlatExpr, FlatMilp, FlatRow, FlatVar, Sense, Stage, StageScope, VarKind};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

/// Triple loop: max over targets of min over sources of max over objectives.
pub fn brute_force_eps(p1: &[Vec<f64>], p2: &[Vec<f64>]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for q in p2 {
        let mut best = f64::INFINITY;
        for p in p1 {
            let mut m = f64::NEG_INFINITY;
            for i in 0..q.len() {
                m = m.max(p[i] - q[i]);
            }
            best = best.min(m);
        }
        worst = worst.max(best);
    }
    worst
}

/// Pairwise dominance filter (weak dominance, exact comparisons).
pub fn brute_force_nondominated(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dominates = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if points.iter().any(|q| dominates(q, p)) {
            continue;
        }
        if points[..i].iter().any(|q| q == p) {
            continue;
        }
        out.push(p.clone());
    }
    out
}

/// Minimum of `objective` over `milp` by enumerating every binary pattern and
/// solving the continuous remainder with minilp. `None` when infeasible.
pub fn enumerate_milp(milp: &FlatMilp, objective: &FlatExpr) -> Option<f64> {
    let bins: Vec<usize> = (0..milp.vars.len()).filter(|&j| milp.vars[j].kind == VarKind::Binary).collect();
    let conts: Vec<usize> = (0..milp.vars.len()).filter(|&j| milp.vars[j].kind == VarKind::Continuous).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1u32 << bins.len()) {
        let mut fixed = vec![0.0; milp.vars.len()];
        let mut ok = true;
        for (k, &j) in bins.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            if v < milp.vars[j].lower || v > milp.vars[j].upper {
                ok = false;
            }
            fixed[j] = v;
        }
        if !ok {
            continue;
        }
        let base: f64 = objective.constant
            + objective.coeffs.iter().filter(|(j, _)| milp.vars[*j].kind == VarKind::Binary).map(|&(j, a)| a * fixed[j]).sum::<f64>();
        let mut prob = Problem::new(OptimizationDirection::Minimize);
        let mut handles = std::collections::HashMap::new();
        for &j in &conts {
            let c = objective.coeffs.iter().filter(|(k, _)| *k == j).map(|(_, a)| a).sum();
            handles.insert(j, prob.add_var(c, (milp.vars[j].lower, milp.vars[j].upper)));
        }
        let mut feasible = true;
        for row in &milp.rows {
            let mut rhs = row.rhs;
            let mut terms = Vec::new();
            for &(j, a) in &row.coeffs {
                match handles.get(&j) {
                    Some(&h) => terms.push((h, a)),
                    None => rhs -= a * fixed[j],
                }
            }
            if terms.is_empty() {
                let ok = match row.sense {
                    Sense::Le => 0.0 <= rhs + 1e-9,
                    Sense::Ge => 0.0 >= rhs - 1e-9,
                    Sense::Eq => rhs.abs() <= 1e-9,
                };
                feasible &= ok;
                continue;
            }
            let op = match row.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            prob.add_constraint(&terms[..], op, rhs);
        }
        if !feasible {
            continue;
        }
        let val = if conts.is_empty() {
            Some(base)
        } else {
            prob.solve().ok().map(|s| s.objective() + base)
        };
        if let Some(v) = val {
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

/// Random bounded MILP with the given numbers of binaries and continuous variables.
pub fn random_milp(rng: &mut impl Rng, nbin: usize, ncont: usize) -> (FlatMilp, FlatExpr) {
    let mut vars = Vec::new();
    for j in 0..nbin {
        vars.push(FlatVar { name: format!("b{j}"), stage: Stage::First, kind: VarKind::Binary, lower: 0.0, upper: 1.0 });
    }
    for j in 0..ncont {
        let lower = if rng.gen_bool(0.3) { -5.0 } else { 0.0 };
        vars.push(FlatVar { name: format!("x{j}"), stage: Stage::Second, kind: VarKind::Continuous, lower, upper: rng.gen_range(1..=10) as f64 });
    }
    let n = vars.len();
    // a random reference point keeps most instances feasible
    let point: Vec<f64> = vars
        .iter()
        .map(|v| if v.kind == VarKind::Binary { rng.gen_range(0..=1) as f64 } else { rng.gen_range(v.lower..=v.upper) })
        .collect();
    let nrows = rng.gen_range(1..=8);
    let mut rows = Vec::new();
    for i in 0..nrows {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                let a = rng.gen_range(-5..=5) as f64;
                if a != 0.0 {
                    coeffs.push((j, a));
                }
            }
        }
        let act: f64 = coeffs.iter().map(|&(j, a)| a * point[j]).sum();
        let r: f64 = rng.gen_range(0.0..1.0);
        let has_cont = coeffs.iter().any(|&(j, _)| vars[j].kind == VarKind::Continuous);
        let (sense, rhs) = if r < 0.15 && has_cont {
            (Sense::Eq, act.round())
        } else if r < 0.6 {
            (Sense::Le, (act + rng.gen_range(-1.0..3.0)).round())
        } else {
            (Sense::Ge, (act - rng.gen_range(-1.0..3.0)).round())
        };
        rows.push(FlatRow { name: format!("r{i}"), coeffs, sense, rhs, scope: StageScope::Coupled });
    }
    let obj = FlatExpr {
        coeffs: (0..n).map(|j| (j, rng.gen_range(-10..=10) as f64)).filter(|&(_, a)| a != 0.0).collect(),
        constant: 0.0,
    };
    let milp = FlatMilp { scenario: "r".into(), vars, rows, objectives: vec![obj.clone()], objective_names: vec!["f".into()] };
    (milp, obj)
}

/// Objective vectors of every feasible binary pattern of a pure-binary MILP.
pub fn enumerate_objectives(milp: &FlatMilp) -> Vec<Vec<f64>> {
    let n = milp.vars.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        if milp.vars.iter().zip(&x).any(|(v, &xv)| xv < v.lower || xv > v.upper) {
            continue;
        }
        if milp.rows.iter().all(|r| r.violation(&x) <= 1e-9) {
            out.push(milp.objective_values(&x));
        }
    }
    out
}

/// Random pure-binary bi-objective knapsack-style model.
pub fn random_biobjective(rng: &mut impl Rng, n: usize) -> FlatMilp {
    let vars: Vec<FlatVar> = (0..n)
        .map(|j| FlatVar { name: format!("b{j}"), stage: Stage::First, kind: VarKind::Binary, lower: 0.0, upper: 1.0 })
        .collect();
    let weights: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.gen_range(1..=9) as f64)).collect();
    let cap: f64 = weights.iter().map(|w| w.1).sum::<f64>() * 0.6;
    let rows = vec![FlatRow { name: "cap".into(), coeffs: weights, sense: Sense::Le, rhs: cap.round(), scope: StageScope::Coupled }];
    let f1 = FlatExpr { coeffs: (0..n).map(|j| (j, -(rng.gen_range(1..=20) as f64))).collect(), constant: 0.0 };
    let f2 = FlatExpr { coeffs: (0..n).map(|j| (j, rng.gen_range(-5..=20) as f64)).collect(), constant: 0.0 };
    FlatMilp { scenario: "r".into(), vars, rows, objectives: vec![f1, f2], objective_names: vec!["f1".into(), "f2".into()] }
}

/// Best worst-case normalized deviation from `target` reachable by the
/// continuous part of `milp` (binaries must already be fixed), via minilp.
/// `None` when the operating problem is infeasible.
pub fn minilp_cover(milp: &FlatMilp, target: &[f64], min: &[f64], range: &[f64]) -> Option<f64> {
    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let cols: Vec<_> = milp.vars.iter().map(|v| prob.add_var(0.0, (v.lower, v.upper))).collect();
    let t = prob.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for row in &milp.rows {
        let terms: Vec<_> = row.coeffs.iter().map(|&(j, a)| (cols[j], a)).collect();
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
            Sense::Eq => ComparisonOp::Eq,
        };
        prob.add_constraint(&terms[..], op, row.rhs);
    }
    for (i, obj) in milp.objectives.iter().enumerate() {
        // (f_i - min_i)/range_i - target_i <= t
        let mut terms: Vec<_> = obj.coeffs.iter().map(|&(j, a)| (cols[j], a / range[i])).collect();
        terms.push((t, -1.0));
        prob.add_constraint(&terms[..], ComparisonOp::Le, target[i] + (min[i] - obj.constant) / range[i]);
    }
    prob.solve().ok().map(|s| s.objective())
}
