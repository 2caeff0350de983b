//! A-posteriori selection of one ideal-front design, for comparison with
//! the flex-hand design.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flexhand::{design_cover, postprocess_covering_front, FlexhandSolution, ScenarioIdeal};
use crate::model::{Design, TwoStageModel};
use crate::pareto::{fmt_num, FrontKind, ParetoFront};
use crate::solver::Solver;

/// Scores closer than this count as ties (lowest index wins).
const TIE_TOL: f64 = 1e-12;

fn bounds(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = points[0].len();
    let lo = (0..k).map(|i| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let hi = (0..k).map(|i| points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    (lo, hi)
}

fn argbest(scores: impl Iterator<Item = f64>, larger_is_better: bool) -> usize {
    let mut best = (0, f64::NAN);
    for (j, s) in scores.enumerate() {
        let better = best.1.is_nan() || if larger_is_better { s > best.1 + TIE_TOL } else { s < best.1 - TIE_TOL };
        if better {
            best = (j, s);
        }
    }
    best.0
}

/// Index of the normalized point nearest (Euclidean) to the component-wise minima.
pub fn closest_to_ideal_index(normalized: &[Vec<f64>]) -> Result<usize> {
    if normalized.is_empty() {
        return Err(Error::EmptyFront);
    }
    let (ideal, _) = bounds(normalized);
    Ok(argbest(normalized.iter().map(|p| p.iter().zip(&ideal).map(|(v, z)| (v - z).powi(2)).sum::<f64>().sqrt()), false))
}

/// TOPSIS closeness `d- / (d+ + d-)` on already-normalized points; `None`
/// weights means equal weights.
pub fn topsis_scores(normalized: &[Vec<f64>], weights: Option<&[f64]>) -> Result<Vec<f64>> {
    if normalized.is_empty() {
        return Err(Error::EmptyFront);
    }
    let k = normalized[0].len();
    let w: Vec<f64> = match weights {
        Some(w) if w.len() != k => return Err(Error::DimensionMismatch { expected: k, found: w.len() }),
        Some(w) if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) => {
            return Err(Error::InvalidArgument("TOPSIS weights must be non-negative".into()))
        }
        Some(w) if w.iter().all(|&x| x == 0.0) => return Err(Error::InvalidArgument("TOPSIS weights are all zero".into())),
        Some(w) => w.to_vec(),
        None => vec![1.0 / k as f64; k],
    };
    let (ideal, nadir) = bounds(normalized);
    let dist = |p: &[f64], r: &[f64]| (0..k).map(|i| (w[i] * (p[i] - r[i])).powi(2)).sum::<f64>().sqrt();
    Ok(normalized
        .iter()
        .map(|p| {
            let (dp, dm) = (dist(p, &ideal), dist(p, &nadir));
            if dp + dm == 0.0 { 1.0 } else { dm / (dp + dm) }
        })
        .collect())
}

pub fn topsis_index(normalized: &[Vec<f64>], weights: Option<&[f64]>) -> Result<usize> {
    Ok(argbest(topsis_scores(normalized, weights)?.into_iter(), true))
}

#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub method: String,
    pub index: usize,
    pub design: Design,
    pub front: ParetoFront,
    pub epsilon: f64,
}

fn report(model: &TwoStageModel, ideal: &ScenarioIdeal, method: &str, index: usize, n_target: usize, solver: &Solver) -> Result<SelectionReport> {
    let vars = model.instantiate(&ideal.scenario)?.vars;
    let design = ideal.front.points[index].design(&vars);
    let epsilon = design_cover(model, &design, ideal, solver)?.epsilon;
    let front = postprocess_covering_front(model, &design, ideal, n_target, FrontKind::FixedFirstStage, solver)?;
    Ok(SelectionReport { method: method.into(), index, design, front, epsilon })
}

pub fn closest_to_ideal(model: &TwoStageModel, ideal: &ScenarioIdeal, n_target: usize, solver: &Solver) -> Result<SelectionReport> {
    let idx = closest_to_ideal_index(&ideal.ctx.normalize_all(&ideal.front.objective_vectors()))?;
    report(model, ideal, "closest-to-ideal", idx, n_target, solver)
}

pub fn topsis(model: &TwoStageModel, ideal: &ScenarioIdeal, weights: Option<&[f64]>, n_target: usize, solver: &Solver) -> Result<SelectionReport> {
    let idx = topsis_index(&ideal.ctx.normalize_all(&ideal.front.objective_vectors()), weights)?;
    report(model, ideal, "topsis", idx, n_target, solver)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: String,
    /// Ideal-front point the design was taken from; `None` for flex-hand.
    pub point_index: Option<usize>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub scenario: String,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,point_index,epsilon\n");
        for r in &self.rows {
            let idx = r.point_index.map(|i| i.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", r.method, idx, fmt_num(r.epsilon));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("scenario {}\n{:<18} {:>6} {:>12}\n", self.scenario, "method", "point", "epsilon");
        for r in &self.rows {
            let idx = r.point_index.map(|i| i.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "{:<18} {:>6} {:>12.6}", r.method, idx, r.epsilon);
        }
        s
    }

    pub fn flexhand_is_minimal(&self, tol: f64) -> bool {
        let flex = self.rows.iter().find(|r| r.method == "flex-hand").map(|r| r.epsilon);
        flex.is_some_and(|f| self.rows.iter().all(|r| f <= r.epsilon + tol))
    }
}

/// Epsilon of each selector's design next to the flex-hand design's.
pub fn compare_selectors(
    model: &TwoStageModel,
    ideal: &ScenarioIdeal,
    flexhand: &FlexhandSolution,
    weights: Option<&[f64]>,
    solver: &Solver,
) -> Result<ComparisonTable> {
    let normalized = ideal.ctx.normalize_all(&ideal.front.objective_vectors());
    let vars = model.instantiate(&ideal.scenario)?.vars;
    let mut rows = Vec::new();
    for (method, idx) in [("closest-to-ideal", closest_to_ideal_index(&normalized)?), ("topsis", topsis_index(&normalized, weights)?)] {
        let design = ideal.front.points[idx].design(&vars);
        let epsilon = design_cover(model, &design, ideal, solver)?.epsilon;
        rows.push(ComparisonRow { method: method.into(), point_index: Some(idx), epsilon });
    }
    let epsilon = design_cover(model, &flexhand.design, ideal, solver)?.epsilon;
    rows.push(ComparisonRow { method: "flex-hand".into(), point_index: None, epsilon });
    Ok(ComparisonTable { scenario: ideal.scenario.clone(), rows })
}
