//! Flex-hand design: the single first-stage design whose operational
//! Pareto front lies closest, in the normalized ε-indicator, to the ideal
//! fronts of one or more scenarios.

use std::collections::BTreeMap;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::{eps_indicator, NormalizationContext};
use crate::model::{Assignment, Design, FlatExpr, FlatMilp, FlatRow, FlatVar, Sense, Stage, StageScope, TwoStageModel, VarId, VarKind};
use crate::pareto::{dominance_filter, generate_front, FrontKind, ParetoFront, ParetoPoint};
use crate::solver::{SolveStatus, Solver};

/// An ideal front together with the normalization derived from it.
#[derive(Debug, Clone)]
pub struct ScenarioIdeal {
    pub scenario: String,
    pub front: ParetoFront,
    pub ctx: NormalizationContext,
}

/// Computes the ideal front of every scenario, in parallel.
pub fn ideal_fronts(model: &TwoStageModel, scenarios: &[String], n_target: usize, solver: &Solver) -> Result<Vec<ScenarioIdeal>> {
    scenarios
        .par_iter()
        .map(|s| {
            let milp = model.instantiate(s)?;
            let front = generate_front(&milp, n_target, solver, FrontKind::Ideal)?;
            let ctx = NormalizationContext::from_points(&front.objective_vectors(), s.clone())?;
            Ok(ScenarioIdeal { scenario: s.clone(), front, ctx })
        })
        .collect()
}

/// Replaces every context by the union of all ranges.
pub fn use_global_ranges(ideals: &mut [ScenarioIdeal]) -> Result<()> {
    let points: Vec<Vec<f64>> = ideals.iter().flat_map(|s| s.front.objective_vectors()).collect();
    for s in ideals.iter_mut() {
        s.ctx = NormalizationContext::from_points(&points, s.scenario.clone())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub scenario: String,
    pub point: usize,
    pub objective: usize,
    pub row: usize,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub scenario: String,
    pub point: usize,
    /// Assembled column of every base-model variable.
    pub columns: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FlexhandProblem {
    pub milp: FlatMilp,
    pub epsilon: usize,
    pub base_vars: Vec<FlatVar>,
    pub blocks: Vec<Block>,
    pub indicator_rows: Vec<IndicatorRow>,
    pub ideals: Vec<ScenarioIdeal>,
    /// Base-model objectives per scenario.
    pub objectives: BTreeMap<String, Vec<FlatExpr>>,
    pub robust: bool,
}

impl FlexhandProblem {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

pub fn build_flexhand(model: &TwoStageModel, ideal: &ScenarioIdeal) -> Result<FlexhandProblem> {
    assemble(model, std::slice::from_ref(ideal), false)
}

pub fn build_robust_flexhand(model: &TwoStageModel, ideals: &[ScenarioIdeal]) -> Result<FlexhandProblem> {
    assemble(model, ideals, true)
}

fn assemble(model: &TwoStageModel, ideals: &[ScenarioIdeal], robust: bool) -> Result<FlexhandProblem> {
    if ideals.is_empty() {
        return Err(Error::InvalidArgument("no scenarios given".into()));
    }
    // duplicated scenarios add nothing
    let mut uniq: Vec<&ScenarioIdeal> = Vec::new();
    for s in ideals {
        if !uniq.iter().any(|u| u.scenario == s.scenario) {
            uniq.push(s);
        }
    }
    for s in &uniq {
        if s.front.is_empty() {
            return Err(Error::EmptyFront);
        }
        if s.ctx.degenerate.iter().all(|&d| d) {
            return Err(Error::DegenerateNormalization);
        }
    }

    let first = model.instantiate(&uniq[0].scenario)?;
    let base_vars = first.vars.clone();
    let k = first.num_objectives();
    let mut vars: Vec<FlatVar> = Vec::new();
    let mut shared = vec![usize::MAX; base_vars.len()];
    for (j, v) in base_vars.iter().enumerate() {
        if v.stage == Stage::First {
            shared[j] = vars.len();
            vars.push(v.clone());
        }
    }
    let epsilon = vars.len();
    vars.push(FlatVar {
        name: "epsilon".into(),
        stage: Stage::First,
        kind: VarKind::Continuous,
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    });

    let mut rows: Vec<FlatRow> = Vec::new();
    let mut blocks = Vec::new();
    let mut indicator_rows = Vec::new();
    let mut objectives = BTreeMap::new();
    for s in &uniq {
        let flat = model.instantiate(&s.scenario)?;
        objectives.insert(s.scenario.clone(), flat.objectives.clone());
        if flat.num_objectives() != s.ctx.num_objectives() {
            return Err(Error::DimensionMismatch { expected: flat.num_objectives(), found: s.ctx.num_objectives() });
        }
        for r in flat.rows.iter().filter(|r| r.scope == StageScope::FirstOnly) {
            let coeffs: Vec<(usize, f64)> = r.coeffs.iter().map(|&(j, a)| (shared[j], a)).collect();
            if !rows.iter().any(|o| o.coeffs == coeffs && o.sense == r.sense && o.rhs == r.rhs) {
                rows.push(FlatRow { coeffs, ..r.clone() });
            }
        }
        let ideal_norm = s.ctx.normalize_all(&s.front.objective_vectors());
        for (p, target) in ideal_norm.iter().enumerate() {
            let tag = format!("{}_{p}", s.scenario);
            let mut columns = shared.clone();
            for (j, v) in base_vars.iter().enumerate() {
                if v.stage == Stage::Second {
                    columns[j] = vars.len();
                    vars.push(FlatVar { name: format!("{}__{tag}", v.name), ..v.clone() });
                }
            }
            for r in flat.rows.iter().filter(|r| r.scope == StageScope::Coupled) {
                rows.push(FlatRow {
                    name: format!("{}__{tag}", r.name),
                    coeffs: r.coeffs.iter().map(|&(j, a)| (columns[j], a)).collect(),
                    ..r.clone()
                });
            }
            for i in 0..k {
                if s.ctx.degenerate[i] {
                    continue;
                }
                let range = s.ctx.range(i);
                let obj = &flat.objectives[i];
                let mut coeffs: Vec<(usize, f64)> = obj.coeffs.iter().map(|&(j, a)| (columns[j], a / range)).collect();
                coeffs.push((epsilon, -1.0));
                indicator_rows.push(IndicatorRow { scenario: s.scenario.clone(), point: p, objective: i, row: rows.len() });
                rows.push(FlatRow {
                    name: format!("indicator__{tag}_{i}"),
                    coeffs,
                    sense: Sense::Le,
                    rhs: target[i] - (obj.constant - s.ctx.min[i]) / range,
                    scope: StageScope::Coupled,
                });
            }
            blocks.push(Block { scenario: s.scenario.clone(), point: p, columns });
        }
    }
    // a degenerate objective has normalized deviation 0, which ε must cover
    if uniq.iter().any(|s| s.ctx.degenerate.iter().any(|&d| d)) {
        vars[epsilon].lower = 0.0;
    }
    let objective = FlatExpr { coeffs: vec![(epsilon, 1.0)], constant: 0.0 };
    let milp = FlatMilp {
        scenario: uniq.iter().map(|s| s.scenario.as_str()).collect::<Vec<_>>().join("+"),
        vars,
        rows,
        objectives: vec![objective],
        objective_names: vec!["epsilon".into()],
    };
    debug!("flex-hand MILP: {} blocks, {} rows, {} columns", blocks.len(), milp.rows.len(), milp.vars.len());
    Ok(FlexhandProblem {
        milp,
        epsilon,
        base_vars,
        blocks,
        indicator_rows,
        ideals: uniq.into_iter().cloned().collect(),
        objectives,
        robust,
    })
}

/// Operating point of one (scenario, ideal point) block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    pub scenario: String,
    pub point: usize,
    pub assignment: Assignment,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub scenario: String,
    pub point: usize,
    pub objective: usize,
}

#[derive(Debug, Clone)]
pub struct FlexhandSolution {
    pub design: Design,
    pub epsilon_star: f64,
    /// False when a solver limit stopped the search early.
    pub optimal: bool,
    pub blocks: Vec<BlockSolution>,
    /// Indicator constraints attaining ε̄* in the canonical solution.
    pub binding: Vec<Binding>,
    /// Post-processed fronts per scenario; empty until [`attach_fronts`].
    pub fronts: BTreeMap<String, ParetoFront>,
}

/// Absolute slack used when freezing ε̄ for the canonical solve.
fn freeze_tol(solver: &Solver, eps: f64) -> f64 {
    solver.config.relative_mip_gap.max(1e-9) * eps.abs().max(1.0)
}

pub fn solve_flexhand(problem: &FlexhandProblem, solver: &Solver) -> Result<FlexhandSolution> {
    let milp = &problem.milp;
    let res = solver.solve(milp, &milp.objectives[0])?;
    let optimal = match res.status {
        SolveStatus::Optimal => true,
        SolveStatus::LimitReached if res.has_solution() => {
            warn!("solver limit reached; returning incumbent: {}", res.message.clone().unwrap_or_default());
            false
        }
        _ => return Err(res.into_optimal(0).unwrap_err()),
    };
    let eps_star = res.objective_value;
    info!("flex-hand ε̄* = {eps_star}");

    // canonical representative: ε̄ frozen, total deviation minimized
    let mut frozen = milp.clone();
    frozen.vars[problem.epsilon].upper = eps_star + freeze_tol(solver, eps_star);
    let mut dense = vec![0.0; milp.vars.len()];
    for ir in &problem.indicator_rows {
        for &(j, a) in &milp.rows[ir.row].coeffs {
            if j != problem.epsilon {
                dense[j] += a;
            }
        }
    }
    let total = FlatExpr { coeffs: dense.into_iter().enumerate().filter(|&(_, a)| a != 0.0).collect(), constant: 0.0 };
    let canon = solver.solve(&frozen, &total)?;
    let x = if canon.status == SolveStatus::Optimal {
        canon.assignment.0
    } else {
        warn!("canonical solve ended with {:?}; keeping first solution", canon.status);
        res.assignment.0
    };
    Ok(unpack(problem, &x, eps_star, optimal))
}

fn unpack(problem: &FlexhandProblem, x: &[f64], eps_star: f64, optimal: bool) -> FlexhandSolution {
    let base = &problem.base_vars;
    let design = Design {
        values: base
            .iter()
            .enumerate()
            .filter(|(_, v)| v.stage == Stage::First)
            .map(|(j, _)| (VarId(j), x[problem.blocks[0].columns[j]]))
            .collect(),
    };
    let blocks = problem
        .blocks
        .iter()
        .map(|b| {
            let a: Vec<f64> = b.columns.iter().map(|&c| x[c]).collect();
            let objectives = objective_values_in(problem, &b.scenario, &a).expect("block scenario has objectives");
            BlockSolution { scenario: b.scenario.clone(), point: b.point, assignment: Assignment(a), objectives }
        })
        .collect();
    let binding = problem
        .indicator_rows
        .iter()
        .filter(|ir| {
            let row = &problem.milp.rows[ir.row];
            let dev = row.coeffs.iter().filter(|(j, _)| *j != problem.epsilon).map(|&(j, a)| a * x[j]).sum::<f64>() - row.rhs;
            dev >= eps_star - 1e-7
        })
        .map(|ir| Binding { scenario: ir.scenario.clone(), point: ir.point, objective: ir.objective })
        .collect();
    FlexhandSolution { design, epsilon_star: eps_star, optimal, blocks, binding, fronts: BTreeMap::new() }
}

fn objective_values_in(problem: &FlexhandProblem, scenario: &str, a: &[f64]) -> Option<Vec<f64>> {
    Some(problem.objectives.get(scenario)?.iter().map(|o| o.value(a)).collect())
}

/// Exact ε of `design` against one scenario's ideal front: for every ideal
/// point the best achievable worst-case normalized deviation, together with
/// an efficient operating point attaining it.
#[derive(Debug, Clone)]
pub struct DesignCover {
    pub epsilon: f64,
    pub per_point: Vec<f64>,
    pub points: Vec<ParetoPoint>,
}

pub fn design_cover(model: &TwoStageModel, design: &Design, ideal: &ScenarioIdeal, solver: &Solver) -> Result<DesignCover> {
    let fixed = model.instantiate(&ideal.scenario)?.fix_first_stage(design)?;
    let ctx = &ideal.ctx;
    let k = fixed.num_objectives();
    let targets = ctx.normalize_all(&ideal.front.objective_vectors());
    let t = fixed.vars.len();
    let mut lp = fixed.clone();
    lp.vars.push(FlatVar { name: "t".into(), stage: Stage::Second, kind: VarKind::Continuous, lower: f64::NEG_INFINITY, upper: f64::INFINITY });
    if ctx.degenerate.iter().any(|&d| d) {
        lp.vars[t].lower = 0.0;
    }
    let norm_rows: Vec<(usize, FlatRow)> = (0..k)
        .filter(|&i| !ctx.degenerate[i])
        .map(|i| {
            let obj = &fixed.objectives[i];
            let range = ctx.range(i);
            let mut coeffs: Vec<(usize, f64)> = obj.coeffs.iter().map(|&(j, a)| (j, a / range)).collect();
            coeffs.push((t, -1.0));
            (i, FlatRow { name: format!("cover_{i}"), coeffs, sense: Sense::Le, rhs: 0.0, scope: StageScope::Coupled })
        })
        .collect();
    let lp_objs: Vec<FlatExpr> = fixed.objectives.clone();
    let mut per_point = Vec::with_capacity(targets.len());
    let mut points = Vec::with_capacity(targets.len());
    for target in &targets {
        let mut m = lp.clone();
        for (i, r) in &norm_rows {
            let obj = &fixed.objectives[*i];
            let rhs = target[*i] - (obj.constant - ctx.min[*i]) / ctx.range(*i);
            m.rows.push(FlatRow { rhs, ..r.clone() });
        }
        m.objectives = lp_objs.iter().cloned().chain(std::iter::once(FlatExpr::default())).collect();
        let res = solver.solve(&m, &FlatExpr { coeffs: vec![(t, 1.0)], constant: 0.0 })?.into_optimal(0)?;
        let tv = res.objective_value;
        // efficient representative inside the box
        m.vars[t].upper = tv + freeze_tol(solver, tv);
        let mut sum = vec![0.0; m.vars.len()];
        for (i, _) in &norm_rows {
            for &(j, a) in &fixed.objectives[*i].coeffs {
                sum[j] += a / ctx.range(*i);
            }
        }
        let total = FlatExpr { coeffs: sum.into_iter().enumerate().filter(|&(_, a)| a != 0.0).collect(), constant: 0.0 };
        let clean = solver.solve(&m, &total)?;
        let x = if clean.status == SolveStatus::Optimal { clean.assignment.0 } else { res.assignment.0 };
        let x: Vec<f64> = x[..t].to_vec();
        let objectives = fixed.objective_values(&x);
        per_point.push(tv);
        points.push(ParetoPoint { objectives, assignment: Assignment(x), scenario_id: ideal.scenario.clone() });
    }
    // the indicator of the representatives is the reported ε
    let normalized: Vec<Vec<f64>> = points.iter().map(|p| ctx.normalize_point(&p.objectives)).collect();
    let epsilon = eps_indicator(&normalized, &targets)?.epsilon;
    Ok(DesignCover { epsilon, per_point, points })
}

/// Fixed-design front of `design` in `scenario`, labelled as a flex-hand front.
pub fn postprocess_front(model: &TwoStageModel, design: &Design, scenario: &str, n_target: usize, solver: &Solver) -> Result<ParetoFront> {
    let fixed = model.instantiate(scenario)?.fix_first_stage(design)?;
    let mut f = generate_front(&fixed, n_target, solver, FrontKind::FlexHand)?;
    f.kind = FrontKind::FlexHand;
    Ok(f)
}

/// Post-processed front extended by the points covering each ideal point,
/// so that its indicator equals the design's exact ε.
pub fn postprocess_covering_front(
    model: &TwoStageModel,
    design: &Design,
    ideal: &ScenarioIdeal,
    n_target: usize,
    kind: FrontKind,
    solver: &Solver,
) -> Result<ParetoFront> {
    let base = postprocess_front(model, design, &ideal.scenario, n_target, solver)?;
    let cover = design_cover(model, design, ideal, solver)?;
    let mut pts = base.points;
    pts.extend(cover.points);
    Ok(dominance_filter(pts, kind))
}

/// Fills `solution.fronts` for every scenario of the problem.
pub fn attach_fronts(model: &TwoStageModel, problem: &FlexhandProblem, solution: &mut FlexhandSolution, n_target: usize, solver: &Solver) -> Result<()> {
    let kind = if problem.robust { FrontKind::RobustFlexHand } else { FrontKind::FlexHand };
    let fronts = problem
        .ideals
        .par_iter()
        .map(|s| Ok((s.scenario.clone(), postprocess_covering_front(model, &solution.design, s, n_target, kind, solver)?)))
        .collect::<Result<Vec<_>>>()?;
    solution.fronts = fronts.into_iter().collect();
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfeasibilityReport {
    pub scenario: String,
    /// False when the design already breaks bounds or first-stage rows.
    pub first_stage_feasible: bool,
    pub violated: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum CrossEvaluation {
    Front(ParetoFront),
    Infeasible(InfeasibilityReport),
}

pub fn cross_evaluate(model: &TwoStageModel, design: &Design, scenario: &str, n_target: usize, solver: &Solver) -> Result<CrossEvaluation> {
    let milp = model.instantiate(scenario)?;
    let fixed = match milp.fix_first_stage(design) {
        Ok(f) => f,
        Err(Error::InfeasibleDesign(msg)) => {
            return Ok(CrossEvaluation::Infeasible(InfeasibilityReport {
                scenario: scenario.into(),
                first_stage_feasible: false,
                violated: vec![msg],
            }))
        }
        Err(e) => return Err(e),
    };
    match generate_front(&fixed, n_target, solver, FrontKind::FixedFirstStage) {
        Ok(f) => Ok(CrossEvaluation::Front(f)),
        Err(Error::Infeasible(_)) => Ok(CrossEvaluation::Infeasible(InfeasibilityReport {
            scenario: scenario.into(),
            first_stage_feasible: true,
            violated: elastic_violations(&fixed, solver)?,
        })),
        Err(e) => Err(e),
    }
}

/// Rows that must be relaxed in a least-violation version of `milp`.
pub fn elastic_violations(milp: &FlatMilp, solver: &Solver) -> Result<Vec<String>> {
    let mut m = milp.clone();
    let mut penalty = Vec::new();
    for (r, row) in milp.rows.iter().enumerate() {
        let w = 1.0 / (1.0 + row.rhs.abs());
        let dirs: &[f64] = match row.sense {
            Sense::Le => &[-1.0],
            Sense::Ge => &[1.0],
            Sense::Eq => &[1.0, -1.0],
        };
        for &d in dirs {
            let col = m.vars.len();
            m.vars.push(FlatVar { name: format!("elastic_{r}"), stage: Stage::Second, kind: VarKind::Continuous, lower: 0.0, upper: f64::INFINITY });
            m.rows[r].coeffs.push((col, d));
            penalty.push((col, w));
        }
    }
    let res = solver.solve(&m, &FlatExpr { coeffs: penalty.clone(), constant: 0.0 })?.into_optimal(0)?;
    let mut out: Vec<String> = penalty
        .iter()
        .filter(|&&(c, _)| res.assignment.0[c] > 1e-6)
        .map(|&(c, _)| {
            let r: usize = m.vars[c].name["elastic_".len()..].parse().expect("elastic column name");
            milp.rows[r].name.clone()
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Per-objective worst relative deviation of a front from the ideal anchors.
pub fn anchor_deviation(front: &ParetoFront, ideal: &ParetoFront) -> Vec<f64> {
    let k = ideal.points.first().map_or(0, |p| p.objectives.len());
    (0..k)
        .map(|i| {
            let best_ideal = ideal.points.iter().map(|p| p.objectives[i]).fold(f64::INFINITY, f64::min);
            let best = front.points.iter().map(|p| p.objectives[i]).fold(f64::INFINITY, f64::min);
            (best - best_ideal) / best_ideal.abs().max(1e-12)
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct SolutionReport<'a> {
    pub epsilon_star: f64,
    pub optimal: bool,
    pub robust: bool,
    pub scenarios: Vec<&'a str>,
    pub design: BTreeMap<&'a str, f64>,
    pub binding: &'a [Binding],
    pub fronts: BTreeMap<String, String>,
}

impl FlexhandSolution {
    /// JSON summary; `front_files` maps scenarios to written CSV names.
    pub fn report<'a>(&'a self, problem: &'a FlexhandProblem, front_files: BTreeMap<String, String>) -> SolutionReport<'a> {
        SolutionReport {
            epsilon_star: self.epsilon_star,
            optimal: self.optimal,
            robust: problem.robust,
            scenarios: problem.ideals.iter().map(|s| s.scenario.as_str()).collect(),
            design: self.design.values.iter().map(|(v, &x)| (problem.base_vars[v.0].name.as_str(), x)).collect(),
            binding: &self.binding,
            fronts: front_files,
        }
    }
}
