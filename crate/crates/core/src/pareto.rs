//! Pareto front generation for multi-objective MILPs by the adaptive
//! ε-constraint method, plus dominance filtering and CSV output.

use std::collections::BinaryHeap;
use std::io::Write;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicator::NormalizationContext;
use crate::model::{Assignment, Design, FlatExpr, FlatMilp, FlatRow, FlatVar, Sense, Stage, StageScope};
use crate::solver::Solver;

/// Weak-dominance tolerance on range-normalized objective values.
pub const DOMINANCE_TOL: f64 = 1e-7;

/// Two solver results closer than this (normalized) are the same point.
const SAME_POINT_TOL: f64 = 1e-6;

/// Normalized objective-2 gaps below this are not subdivided further.
const MIN_GAP: f64 = 1e-5;

/// Relative shift used when the midpoint cut only reproduces the lower end.
const RETRY_SHIFT: f64 = 1e-6;

/// Finest grid used for more than two objectives.
const MAX_GRID_LEVEL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontKind {
    Ideal,
    FixedFirstStage,
    FlexHand,
    RobustFlexHand,
}

impl FrontKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontKind::Ideal => "ideal",
            FrontKind::FixedFirstStage => "fixed-first-stage",
            FrontKind::FlexHand => "flex-hand",
            FrontKind::RobustFlexHand => "robust-flex-hand",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub objectives: Vec<f64>,
    pub assignment: Assignment,
    pub scenario_id: String,
}

impl ParetoPoint {
    fn from_solution(milp: &FlatMilp, x: Vec<f64>) -> Self {
        ParetoPoint { objectives: milp.objective_values(&x), assignment: Assignment(x), scenario_id: milp.scenario.clone() }
    }

    pub fn design(&self, vars: &[FlatVar]) -> Design {
        Design::from_assignment(vars, &self.assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub points: Vec<ParetoPoint>,
    pub kind: FrontKind,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn objective_vectors(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.objectives.clone()).collect()
    }
}

fn scales(points: &[Vec<f64>]) -> Vec<f64> {
    let k = points.first().map_or(0, Vec::len);
    (0..k)
        .map(|i| {
            let lo = points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > 1e-12 { hi - lo } else { 1.0 }
        })
        .collect()
}

fn dominates(p: &[f64], q: &[f64], scale: &[f64]) -> bool {
    let mut strict = false;
    for i in 0..p.len() {
        let d = (p[i] - q[i]) / scale[i];
        if d > DOMINANCE_TOL {
            return false;
        }
        if d < -DOMINANCE_TOL {
            strict = true;
        }
    }
    strict
}

fn same(p: &[f64], q: &[f64], scale: &[f64], tol: f64) -> bool {
    (0..p.len()).all(|i| ((p[i] - q[i]) / scale[i]).abs() <= tol)
}

/// Indices of the non-dominated points, first representative of each
/// duplicate group, in input order.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let scale = scales(points);
    let mut keep: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if points.iter().any(|q| dominates(q, p, &scale)) {
            continue;
        }
        if keep.iter().any(|&j| same(&points[j], p, &scale, DOMINANCE_TOL)) {
            continue;
        }
        keep.push(i);
    }
    keep
}

/// Maximal non-dominated subset, sorted lexicographically by objectives.
pub fn dominance_filter(points: Vec<ParetoPoint>, kind: FrontKind) -> ParetoFront {
    let objs: Vec<Vec<f64>> = points.iter().map(|p| p.objectives.clone()).collect();
    let keep = nondominated_indices(&objs);
    let mut slots: Vec<Option<ParetoPoint>> = points.into_iter().map(Some).collect();
    let mut kept: Vec<ParetoPoint> = keep.into_iter().filter_map(|i| slots[i].take()).collect();
    kept.sort_by(|a, b| {
        a.objectives.iter().zip(&b.objectives).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    ParetoFront { points: kept, kind }
}

/// Adds `f_i(x) <= bound` rows; `None` when a constant objective already
/// violates its bound.
fn with_bounds(milp: &FlatMilp, bounds: &[(usize, f64)]) -> Option<FlatMilp> {
    let mut out = milp.clone();
    for &(i, b) in bounds {
        let obj = &milp.objectives[i];
        if obj.coeffs.is_empty() {
            if obj.constant > b + 1e-9 * b.abs().max(1.0) {
                return None;
            }
            continue;
        }
        out.rows.push(FlatRow {
            name: format!("bound_{}", milp.objective_names[i]),
            coeffs: obj.coeffs.clone(),
            sense: Sense::Le,
            rhs: b - obj.constant,
            scope: StageScope::Coupled,
        });
    }
    Some(out)
}

fn sum_except(milp: &FlatMilp, i: usize) -> FlatExpr {
    let mut dense: Vec<f64> = vec![0.0; milp.vars.len()];
    let mut constant = 0.0;
    for (k, o) in milp.objectives.iter().enumerate() {
        if k == i {
            continue;
        }
        constant += o.constant;
        for &(j, a) in &o.coeffs {
            dense[j] += a;
        }
    }
    FlatExpr { coeffs: dense.into_iter().enumerate().filter(|&(_, a)| a != 0.0).collect(), constant }
}

/// Minimizes objective `i` subject to `bounds`, then the sum of the others
/// with `f_i` held at its optimum. `Ok(None)` when the bounds are infeasible.
fn lexicographic(milp: &FlatMilp, i: usize, bounds: &[(usize, f64)], solver: &Solver) -> Result<Option<ParetoPoint>> {
    let Some(bounded) = with_bounds(milp, bounds) else {
        return Ok(None);
    };
    let first = solver.solve(&bounded, &milp.objectives[i])?;
    let first = match first.status {
        crate::solver::SolveStatus::Infeasible if !bounds.is_empty() => return Ok(None),
        _ => first.into_optimal(i)?,
    };
    if milp.num_objectives() == 1 {
        return Ok(Some(ParetoPoint::from_solution(milp, first.assignment.0)));
    }
    let fi = first.objective_value;
    let slack = solver.config.relative_mip_gap.max(1e-9) * fi.abs().max(1.0);
    let mut cleanup_bounds = bounds.to_vec();
    cleanup_bounds.push((i, fi + slack));
    let secondary = sum_except(milp, i);
    let second = with_bounds(milp, &cleanup_bounds).map(|m| solver.solve(&m, &secondary)).transpose()?;
    let x = match second {
        Some(r) if r.status == crate::solver::SolveStatus::Optimal => r.assignment.0,
        _ => {
            debug!("cleanup for objective {i} failed; keeping first-phase point");
            first.assignment.0
        }
    };
    Ok(Some(ParetoPoint::from_solution(milp, x)))
}

/// Lexicographic optimum of objective `i`, ties broken by the sum of the
/// remaining objectives.
pub fn solve_anchor(milp: &FlatMilp, i: usize, solver: &Solver) -> Result<ParetoPoint> {
    if i >= milp.num_objectives() {
        return Err(Error::InvalidArgument(format!("objective index {i} out of range")));
    }
    Ok(lexicographic(milp, i, &[], solver)?.expect("unbounded problem has a solution"))
}

/// Front of up to `n_target` efficient points (anchors included).
pub fn generate_front(milp: &FlatMilp, n_target: usize, solver: &Solver, kind: FrontKind) -> Result<ParetoFront> {
    if n_target < 2 {
        return Err(Error::InvalidArgument("front resolution must be at least 2".into()));
    }
    let k = milp.num_objectives();
    if k == 0 {
        return Err(Error::InvalidModel("model has no objectives".into()));
    }
    let anchors = (0..k).into_par_iter().map(|i| solve_anchor(milp, i, solver)).collect::<Result<Vec<_>>>()?;
    let front = match k {
        1 => anchors,
        2 => bisection(milp, anchors, n_target, solver)?,
        _ => grid(milp, anchors, n_target, solver)?,
    };
    let front = dominance_filter(front, kind);
    info!("scenario `{}`: {} front with {} points", milp.scenario, kind.as_str(), front.len());
    Ok(front)
}

struct Gap {
    width: f64,
    lower: f64,
    upper_idx: usize,
    lower_idx: usize,
}

impl PartialEq for Gap {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for Gap {}
impl PartialOrd for Gap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Gap {
    // widest first, then the one with the smaller lower bound
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.width.total_cmp(&other.width).then(other.lower.total_cmp(&self.lower))
    }
}

fn bisection(milp: &FlatMilp, anchors: Vec<ParetoPoint>, n_target: usize, solver: &Solver) -> Result<Vec<ParetoPoint>> {
    let anchor_objs: Vec<Vec<f64>> = anchors.iter().map(|p| p.objectives.clone()).collect();
    let scale = scales(&anchor_objs);
    if same(&anchor_objs[0], &anchor_objs[1], &scale, SAME_POINT_TOL)
        || anchor_objs[0][1] - anchor_objs[1][1] <= 1e-12
    {
        return Ok(anchors);
    }
    let range2 = anchor_objs[0][1] - anchor_objs[1][1];
    // points[0] has the smallest f1 (largest f2)
    let mut points = anchors;
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Gap>, points: &[ParetoPoint], u: usize, l: usize| {
        let width = (points[u].objectives[1] - points[l].objectives[1]) / range2;
        if width > MIN_GAP {
            heap.push(Gap { width, lower: points[l].objectives[1], upper_idx: u, lower_idx: l });
        }
    };
    push(&mut heap, &points, 0, 1);
    while points.len() < n_target {
        let Some(gap) = heap.pop() else { break };
        let (a, b) = (&points[gap.upper_idx], &points[gap.lower_idx]);
        let (fa, fb) = (a.objectives[1], b.objectives[1]);
        let mut found = None;
        for bound in [0.5 * (fa + fb), fa - RETRY_SHIFT * range2] {
            match lexicographic(milp, 0, &[(1, bound)], solver)? {
                Some(p) if !same(&p.objectives, &b.objectives, &scale, SAME_POINT_TOL) => {
                    found = Some(p);
                    break;
                }
                _ => {}
            }
        }
        let Some(p) = found else {
            debug!("gap [{fb}, {fa}] closed");
            continue;
        };
        if same(&p.objectives, &points[gap.upper_idx].objectives, &scale, SAME_POINT_TOL) {
            continue;
        }
        debug!("new point {:?}", p.objectives);
        points.push(p);
        let r = points.len() - 1;
        push(&mut heap, &points, gap.upper_idx, r);
        push(&mut heap, &points, r, gap.lower_idx);
    }
    Ok(points)
}

fn grid(milp: &FlatMilp, anchors: Vec<ParetoPoint>, n_target: usize, solver: &Solver) -> Result<Vec<ParetoPoint>> {
    let k = milp.num_objectives();
    let anchor_objs: Vec<Vec<f64>> = anchors.iter().map(|p| p.objectives.clone()).collect();
    let scale = scales(&anchor_objs);
    let lo: Vec<f64> = (0..k).map(|i| anchor_objs.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let mut points: Vec<ParetoPoint> = Vec::new();
    for a in anchors {
        if !points.iter().any(|p| same(&p.objectives, &a.objectives, &scale, SAME_POINT_TOL)) {
            points.push(a);
        }
    }
    let chunk = rayon::current_num_threads().max(1);
    let mut level = 2;
    while points.len() < n_target && level <= MAX_GRID_LEVEL {
        // cells of this level not already visited at a coarser one
        let mut cells: Vec<Vec<usize>> = vec![vec![]];
        for _ in 1..k {
            cells = cells
                .into_iter()
                .flat_map(|c| (1..level).map(move |s| [c.clone(), vec![s]].concat()))
                .collect();
        }
        cells.retain(|c| level == 2 || c.iter().any(|s| s % 2 == 1));
        for batch in cells.chunks(chunk) {
            let found = batch
                .par_iter()
                .map(|c| {
                    let bounds: Vec<(usize, f64)> = c
                        .iter()
                        .enumerate()
                        .map(|(m, &s)| (m + 1, lo[m + 1] + scale[m + 1] * s as f64 / level as f64))
                        .collect();
                    lexicographic(milp, 0, &bounds, solver)
                })
                .collect::<Result<Vec<_>>>()?;
            for p in found.into_iter().flatten() {
                if points.len() >= n_target {
                    break;
                }
                if !points.iter().any(|q| same(&q.objectives, &p.objectives, &scale, SAME_POINT_TOL)) {
                    points.push(p);
                }
            }
            if points.len() >= n_target {
                break;
            }
        }
        level *= 2;
    }
    Ok(points)
}

/// Front of `milp` with every first-stage variable fixed to `design`.
pub fn fixed_design_front(milp: &FlatMilp, design: &Design, n_target: usize, solver: &Solver) -> Result<ParetoFront> {
    generate_front(&milp.fix_first_stage(design)?, n_target, solver, FrontKind::FixedFirstStage)
}

/// Writes fronts as CSV: `scenario,kind`, raw objectives, `_norm` columns
/// when a context is given, then first-stage variable values.
pub fn write_fronts_csv<W: Write>(
    out: &mut W,
    fronts: &[(&ParetoFront, Option<&NormalizationContext>)],
    vars: &[FlatVar],
    objective_names: &[String],
) -> Result<()> {
    let with_norm = fronts.iter().any(|(_, c)| c.is_some());
    let first: Vec<usize> = (0..vars.len()).filter(|&j| vars[j].stage == Stage::First).collect();
    let mut header = vec!["scenario".to_string(), "kind".to_string()];
    header.extend(objective_names.iter().cloned());
    if with_norm {
        header.extend(objective_names.iter().map(|n| format!("{n}_norm")));
    }
    header.extend(first.iter().map(|&j| vars[j].name.clone()));
    writeln!(out, "{}", header.join(","))?;
    for (front, ctx) in fronts {
        for p in &front.points {
            let mut row = vec![p.scenario_id.clone(), front.kind.as_str().to_string()];
            row.extend(p.objectives.iter().map(|v| fmt_num(*v)));
            if with_norm {
                match ctx {
                    Some(c) => row.extend(c.normalize_point(&p.objectives).into_iter().map(fmt_num)),
                    None => row.extend(std::iter::repeat(String::new()).take(objective_names.len())),
                }
            }
            row.extend(first.iter().map(|&j| fmt_num(p.assignment.0.get(j).copied().unwrap_or(f64::NAN))));
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Shortest round-trip decimal representation, with `-0` printed as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarKind;

    fn point(o: &[f64]) -> ParetoPoint {
        ParetoPoint { objectives: o.to_vec(), assignment: Assignment::default(), scenario_id: "s".into() }
    }

    #[test]
    fn filter_examples() {
        let f = dominance_filter(vec![point(&[1.0, 2.0]), point(&[2.0, 1.0]), point(&[2.0, 2.0])], FrontKind::Ideal);
        assert_eq!(f.objective_vectors(), vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        let f = dominance_filter(vec![point(&[3.0, 3.0]); 4], FrontKind::Ideal);
        assert_eq!(f.len(), 1);
        assert!(dominance_filter(vec![], FrontKind::Ideal).is_empty());
    }

    #[test]
    fn filter_sorts_by_first_objective() {
        let f = dominance_filter(vec![point(&[3.0, 0.0]), point(&[0.0, 3.0]), point(&[1.0, 1.0])], FrontKind::Ideal);
        assert_eq!(f.objective_vectors(), vec![vec![0.0, 3.0], vec![1.0, 1.0], vec![3.0, 0.0]]);
    }

    fn bi_objective(vars: Vec<FlatVar>, rows: Vec<FlatRow>, f1: FlatExpr, f2: FlatExpr) -> FlatMilp {
        FlatMilp { scenario: "s".into(), vars, rows, objectives: vec![f1, f2], objective_names: vec!["f1".into(), "f2".into()] }
    }

    fn bin(name: &str) -> FlatVar {
        FlatVar { name: name.into(), stage: Stage::First, kind: VarKind::Binary, lower: 0.0, upper: 1.0 }
    }

    #[test]
    fn degenerate_anchor_picks_smaller_second_objective() {
        // f1 = 0 everywhere, f2 = 1 - x: min f1 is degenerate
        let m = bi_objective(
            vec![bin("x")],
            vec![],
            FlatExpr { coeffs: vec![], constant: 0.0 },
            FlatExpr { coeffs: vec![(0, -1.0)], constant: 1.0 },
        );
        let a = solve_anchor(&m, 0, &Solver::default()).unwrap();
        assert_eq!(a.objectives, vec![0.0, 0.0]);
        let f = generate_front(&m, 5, &Solver::default(), FrontKind::Ideal).unwrap();
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn single_feasible_point() {
        let mut v = bin("x");
        v.lower = 1.0;
        let m = bi_objective(
            vec![v],
            vec![],
            FlatExpr { coeffs: vec![(0, 2.0)], constant: 0.0 },
            FlatExpr { coeffs: vec![(0, 3.0)], constant: 0.0 },
        );
        let f = generate_front(&m, 10, &Solver::default(), FrontKind::Ideal).unwrap();
        assert_eq!(f.objective_vectors(), vec![vec![2.0, 3.0]]);
    }

    #[test]
    fn two_points_give_anchors_only() {
        let vars = vec![bin("a"), bin("b"), bin("c")];
        let f1 = FlatExpr { coeffs: vec![(0, -3.0), (1, -2.0), (2, -1.0)], constant: 0.0 };
        let f2 = FlatExpr { coeffs: vec![(0, 2.0), (1, 1.0), (2, 1.0)], constant: 0.0 };
        let m = bi_objective(vars, vec![], f1, f2);
        let solver = Solver::default();
        let f = generate_front(&m, 2, &solver, FrontKind::Ideal).unwrap();
        let a0 = solve_anchor(&m, 0, &solver).unwrap();
        let a1 = solve_anchor(&m, 1, &solver).unwrap();
        assert_eq!(f.objective_vectors(), vec![a0.objectives, a1.objectives]);
        assert!(matches!(generate_front(&m, 1, &solver, FrontKind::Ideal), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn csv_layout() {
        let m = bi_objective(vec![bin("x")], vec![], FlatExpr::default(), FlatExpr::default());
        let mut p = point(&[1.5, -0.0]);
        p.assignment = Assignment(vec![1.0]);
        let front = ParetoFront { points: vec![p], kind: FrontKind::Ideal };
        let ctx = NormalizationContext::from_points(&[vec![1.0, 0.0], vec![2.0, 1.0]], "s").unwrap();
        let mut buf = Vec::new();
        write_fronts_csv(&mut buf, &[(&front, Some(&ctx))], &m.vars, &m.objective_names).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scenario,kind,f1,f2,f1_norm,f2_norm,x\ns,ideal,1.5,0,0.5,0,1\n");
    }
}
