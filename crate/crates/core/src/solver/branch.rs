//! Best-bound branch-and-bound over binary variables.
//!
//! Every node re-optimizes a copy of the root tableau with the node's binary
//! fixings applied, using the dual simplex. Branching picks the most
//! fractional binary (lowest index on ties); open nodes are processed in
//! order of their parent's LP bound, ties by creation order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use log::debug;

use super::simplex::{LpOutcome, Simplex};
use super::{NodeRecord, SolveStats, SolveStatus, SolverConfig, SolverResult};
use crate::model::{Assignment, FlatExpr, FlatMilp, VarKind};

struct Node {
    id: usize,
    bound: f64,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.id.cmp(&self.id))
    }
}

pub(crate) fn iteration_limit(milp: &FlatMilp) -> usize {
    50 * (milp.vars.len() + milp.rows.len()) + 10_000
}

pub(crate) fn lp_result(
    milp: &FlatMilp,
    objective: &FlatExpr,
    simplex: &Simplex,
    outcome: LpOutcome,
    stats: SolveStats,
) -> SolverResult {
    match outcome {
        LpOutcome::Optimal => {
            let x = simplex.values().to_vec();
            let value = objective.value(&x);
            SolverResult {
                status: SolveStatus::Optimal,
                objective_value: value,
                best_bound: value,
                assignment: Assignment(x),
                stats,
                infeasible_rows: Vec::new(),
                message: None,
            }
        }
        LpOutcome::Infeasible(cols) => SolverResult {
            infeasible_rows: describe_columns(milp, simplex, &cols),
            ..SolverResult::without_solution(SolveStatus::Infeasible, stats)
        },
        LpOutcome::Unbounded => SolverResult::without_solution(SolveStatus::Unbounded, stats),
        LpOutcome::IterationLimit => SolverResult {
            message: Some(format!("simplex iteration limit after {} pivots", simplex.iterations)),
            ..SolverResult::without_solution(SolveStatus::LimitReached, stats)
        },
    }
}

fn describe_columns(milp: &FlatMilp, simplex: &Simplex, cols: &[usize]) -> Vec<String> {
    let mut out: Vec<String> = cols
        .iter()
        .map(|&c| match simplex.logical_row(c) {
            Some(r) => milp.rows[r].name.clone(),
            None => format!("bound of {}", milp.vars[c].name),
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

pub(crate) fn solve(milp: &FlatMilp, objective: &FlatExpr, config: &SolverConfig) -> SolverResult {
    let start = Instant::now();
    let max_iter = iteration_limit(milp);
    let binaries: Vec<usize> = milp
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();

    let mut root = Simplex::new(milp, objective, config.feasibility_tol);
    // Binaries with fractional bounds collapse onto the integers they admit.
    for &j in &binaries {
        let v = &milp.vars[j];
        let (lo, hi) = (v.lower.ceil(), v.upper.floor());
        if lo > hi {
            let stats = SolveStats::default();
            return SolverResult {
                infeasible_rows: vec![format!("bound of {}", v.name)],
                ..SolverResult::without_solution(SolveStatus::Infeasible, stats)
            };
        }
        if lo != v.lower || hi != v.upper {
            root.set_bounds(j, lo, hi);
        }
    }
    let outcome = root.primal(max_iter);
    let mut stats = SolveStats { nodes: 1, lp_iterations: root.iterations, ..Default::default() };
    if outcome != LpOutcome::Optimal {
        return lp_result(milp, objective, &root, outcome, stats);
    }

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    let mut gap_pruned_bound = f64::INFINITY;
    let mut limit: Option<String> = None;

    heap.push(Node { id: next_id, bound: f64::NEG_INFINITY, fixings: Vec::new() });
    next_id += 1;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - gap_abs(config, *inc) {
                gap_pruned_bound = gap_pruned_bound.min(node.bound);
                continue;
            }
        }
        if stats.nodes >= config.node_limit {
            limit = Some(format!("node limit {} reached", config.node_limit));
            heap.push(node);
            break;
        }
        if config.time_limit.is_some_and(|tl| start.elapsed() >= tl) {
            limit = Some("time limit reached".into());
            heap.push(node);
            break;
        }

        let (lp, outcome) = if node.id == 0 {
            (None, LpOutcome::Optimal)
        } else {
            stats.nodes += 1;
            let mut lp = root.clone();
            lp.iterations = 0;
            for &(j, v) in &node.fixings {
                lp.set_bounds(j, v, v);
            }
            let outcome = lp.reoptimize(max_iter);
            stats.lp_iterations += lp.iterations;
            (Some(lp), outcome)
        };
        let lp = lp.as_ref().unwrap_or(&root);
        match outcome {
            LpOutcome::Optimal => {}
            LpOutcome::Infeasible(_) => {
                stats.node_log.push(NodeRecord { id: node.id, parent_bound: node.bound, lp_bound: None });
                continue;
            }
            LpOutcome::Unbounded => {
                return SolverResult::without_solution(SolveStatus::Unbounded, stats);
            }
            LpOutcome::IterationLimit => {
                limit = Some(format!("simplex iteration limit in node {}", node.id));
                break;
            }
        }
        let x = lp.values();
        let z = objective.value(x);
        stats.node_log.push(NodeRecord { id: node.id, parent_bound: node.bound, lp_bound: Some(z) });
        if let Some((inc, _)) = &incumbent {
            if z >= inc - gap_abs(config, *inc) {
                gap_pruned_bound = gap_pruned_bound.min(z);
                continue;
            }
        }

        let branch_var = binaries
            .iter()
            .copied()
            .map(|j| (j, (x[j] - x[j].round()).abs()))
            .filter(|&(_, f)| f > config.integrality_tol)
            .fold(None, |best: Option<(usize, f64)>, (j, f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((j, f)),
            });

        let mut branch_on = branch_var.map(|(j, _)| j);
        if branch_on.is_none() {
            // snap binaries and re-solve the continuous part exactly
            let mut polish = lp.clone();
            for &j in &binaries {
                let v = x[j].round();
                polish.set_bounds(j, v, v);
            }
            let outcome = polish.reoptimize(max_iter);
            stats.lp_iterations += polish.iterations;
            let sol = if outcome == LpOutcome::Optimal {
                Some(polish.values().to_vec())
            } else {
                // a near-integral binary was propping up the LP; branch on it
                branch_on = binaries
                    .iter()
                    .copied()
                    .filter(|&j| x[j] != x[j].round())
                    .max_by(|&a, &b| (x[a] - x[a].round()).abs().total_cmp(&(x[b] - x[b].round()).abs()));
                if branch_on.is_none() { Some(x.to_vec()) } else { None }
            };
            if let Some(mut sol) = sol {
                for &j in &binaries {
                    sol[j] = sol[j].round();
                }
                for (v, s) in milp.vars.iter().zip(sol.iter_mut()) {
                    *s = s.clamp(v.lower, v.upper);
                }
                let val = objective.value(&sol);
                if incumbent.as_ref().map_or(true, |(inc, _)| val < *inc) {
                    debug!("node {}: new incumbent {val}", node.id);
                    stats.incumbents.push(val);
                    incumbent = Some((val, sol));
                }
            }
        }
        if let Some(j) = branch_on {
            stats.branched += 1;
            for v in [0.0, 1.0] {
                let mut fixings = node.fixings.clone();
                fixings.push((j, v));
                heap.push(Node { id: next_id, bound: z, fixings });
                next_id += 1;
            }
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match incumbent {
        Some((val, x)) => {
            let best_bound = val.min(gap_pruned_bound).min(open_bound);
            SolverResult {
                status: if limit.is_some() { SolveStatus::LimitReached } else { SolveStatus::Optimal },
                objective_value: val,
                best_bound,
                assignment: Assignment(x),
                stats,
                infeasible_rows: Vec::new(),
                message: limit,
            }
        }
        None if limit.is_some() => SolverResult {
            message: limit,
            best_bound: open_bound,
            ..SolverResult::without_solution(SolveStatus::LimitReached, stats)
        },
        None => SolverResult {
            infeasible_rows: vec!["no integer-feasible assignment".into()],
            ..SolverResult::without_solution(SolveStatus::Infeasible, stats)
        },
    }
}

fn gap_abs(config: &SolverConfig, incumbent: f64) -> f64 {
    config.relative_mip_gap * incumbent.abs().max(1.0)
}
