//! Embedded LP/MILP solver and delegation to external solvers via LP files.

mod branch;
pub mod lpfile;
mod simplex;

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::Duration;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::model::{Assignment, FlatExpr, FlatMilp, VarKind, FEASIBILITY_CHECK_TOL};

pub use lpfile::{export_lp_file, parse_lp_str, read_lp_file, write_lp_string, LpFile};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    pub relative_mip_gap: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-9,
            integrality_tol: 1e-6,
            relative_mip_gap: 1e-6,
            node_limit: 1_000_000,
            time_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.feasibility_tol, self.integrality_tol, self.relative_mip_gap];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.node_limit == 0 {
            return Err(Error::InvalidArgument("node limit must be positive".into()));
        }
        Ok(())
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.relative_mip_gap = gap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    LimitReached,
}

/// One processed branch-and-bound node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    /// LP bound inherited from the parent (`-inf` at the root).
    pub parent_bound: f64,
    /// LP value of the node, `None` when infeasible.
    pub lp_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveStats {
    pub nodes: usize,
    pub branched: usize,
    pub lp_iterations: usize,
    pub incumbents: Vec<f64>,
    pub node_log: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub status: SolveStatus,
    pub objective_value: f64,
    pub best_bound: f64,
    pub assignment: Assignment,
    pub stats: SolveStats,
    /// Rows (or bounds) still violated when infeasibility was detected.
    pub infeasible_rows: Vec<String>,
    pub message: Option<String>,
}

impl SolverResult {
    fn without_solution(status: SolveStatus, stats: SolveStats) -> Self {
        SolverResult {
            status,
            objective_value: f64::NAN,
            best_bound: f64::NAN,
            assignment: Assignment::default(),
            stats,
            infeasible_rows: Vec::new(),
            message: None,
        }
    }

    pub fn has_solution(&self) -> bool {
        !self.assignment.0.is_empty()
    }

    /// Converts non-optimal outcomes into errors; `objective` labels
    /// unboundedness.
    pub fn into_optimal(self, objective: usize) -> Result<SolverResult> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::Infeasible => Err(Error::Infeasible(self.infeasible_rows)),
            SolveStatus::Unbounded => Err(Error::Unbounded(objective)),
            SolveStatus::LimitReached => {
                Err(Error::LimitReached(self.message.unwrap_or_else(|| "solver limit".into())))
            }
        }
    }
}

/// Solves the continuous relaxation of `milp`.
pub fn solve_lp(milp: &FlatMilp, objective: &FlatExpr, config: &SolverConfig) -> SolverResult {
    let mut lp = simplex::Simplex::new(milp, objective, config.feasibility_tol);
    let outcome = lp.primal(branch::iteration_limit(milp));
    let stats = SolveStats { nodes: 1, lp_iterations: lp.iterations, ..Default::default() };
    let res = branch::lp_result(milp, objective, &lp, outcome, stats);
    check_result(milp, &res, false);
    res
}

/// Solves `milp` to global optimality within the configured MIP gap.
pub fn solve_milp(milp: &FlatMilp, objective: &FlatExpr, config: &SolverConfig) -> SolverResult {
    let res = branch::solve(milp, objective, config);
    debug!(
        "milp {}x{}: {:?} obj {} after {} nodes, {} pivots",
        milp.rows.len(),
        milp.vars.len(),
        res.status,
        res.objective_value,
        res.stats.nodes,
        res.stats.lp_iterations
    );
    check_result(milp, &res, true);
    res
}

fn check_result(milp: &FlatMilp, res: &SolverResult, integral: bool) {
    if !res.has_solution() {
        return;
    }
    let bad = milp.violations(&res.assignment.0, FEASIBILITY_CHECK_TOL);
    if !bad.is_empty() {
        warn!("solution violates {} rows/bounds, first: {}", bad.len(), bad[0]);
    }
    if integral {
        let frac = milp
            .vars
            .iter()
            .zip(&res.assignment.0)
            .any(|(v, x)| v.kind == VarKind::Binary && (x - x.round()).abs() > 1e-6);
        if frac {
            warn!("solution has fractional binaries");
        }
    }
}

/// Where models are solved.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Backend {
    #[default]
    Embedded,
    /// Runs `command <model.lp> <solution.txt>`; the solution file lists
    /// `<varname> <value>` per line.
    LpFile { command: Vec<String> },
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "embedded" {
            return Ok(Backend::Embedded);
        }
        if let Some(cmd) = s.strip_prefix("lpfile:") {
            let command: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            if command.is_empty() {
                return Err(Error::InvalidArgument("lpfile backend needs a command".into()));
            }
            return Ok(Backend::LpFile { command });
        }
        Err(Error::InvalidArgument(format!("unknown solver `{s}` (expected embedded or lpfile:<cmd>)")))
    }
}

/// Solver configuration plus backend selection; shared by all pipelines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solver {
    pub config: SolverConfig,
    pub backend: Backend,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config, backend: Backend::Embedded }
    }

    pub fn solve(&self, milp: &FlatMilp, objective: &FlatExpr) -> Result<SolverResult> {
        match &self.backend {
            Backend::Embedded => Ok(solve_milp(milp, objective, &self.config)),
            Backend::LpFile { command } => solve_external(milp, objective, command),
        }
    }
}

fn solve_external(milp: &FlatMilp, objective: &FlatExpr, command: &[String]) -> Result<SolverResult> {
    let dir = tempfile::tempdir()?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("solution.txt");
    export_lp_file(milp, objective, &lp_path)?;
    let status = Command::new(&command[0])
        .args(&command[1..])
        .arg(&lp_path)
        .arg(&sol_path)
        .status()
        .map_err(|e| Error::ExternalSolver(format!("cannot run `{}`: {e}", command[0])))?;
    if !status.success() {
        return Err(Error::ExternalSolver(format!("`{}` exited with {status}", command.join(" "))));
    }
    let stats = SolveStats { nodes: 1, ..Default::default() };
    if !sol_path.exists() {
        return Ok(SolverResult::without_solution(SolveStatus::Infeasible, stats));
    }
    let values = read_solution_file(&sol_path)?;
    if values.is_empty() {
        return Ok(SolverResult::without_solution(SolveStatus::Infeasible, stats));
    }
    let names = lpfile::lp_names(milp.vars.iter().map(|v| v.name.as_str()), 'x');
    let x = names
        .iter()
        .zip(&milp.vars)
        .map(|(n, v)| match values.get(n) {
            Some(&val) => Ok(val),
            // solvers commonly omit zeros
            None if v.lower <= 0.0 && v.upper >= 0.0 => Ok(0.0),
            None => Err(Error::ExternalSolver(format!("solution misses variable `{n}`"))),
        })
        .collect::<Result<Vec<f64>>>()?;
    let value = objective.value(&x);
    Ok(SolverResult {
        status: SolveStatus::Optimal,
        objective_value: value,
        best_bound: value,
        assignment: Assignment(x),
        stats,
        infeasible_rows: Vec::new(),
        message: None,
    })
}

/// Reads `<varname> <value>` lines; blank lines and `#` comments are skipped.
pub fn read_solution_file(path: &Path) -> Result<HashMap<String, f64>> {
    parse_solution(&std::fs::read_to_string(path)?)
}

pub fn parse_solution(text: &str) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::ExternalSolver(format!("solution line {}: expected `<name> <value>`", i + 1)));
        };
        let v: f64 = val
            .parse()
            .map_err(|_| Error::ExternalSolver(format!("solution line {}: bad value `{val}`", i + 1)))?;
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

/// Writes a solution in the format [`read_solution_file`] accepts, using LP
/// names of `milp`.
pub fn write_solution(milp: &FlatMilp, x: &[f64]) -> String {
    let names = lpfile::lp_names(milp.vars.iter().map(|v| v.name.as_str()), 'x');
    names.iter().zip(x).map(|(n, v)| format!("{n} {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FlatRow, FlatVar, Sense, Stage, StageScope};

    fn var(name: &str, kind: VarKind, lower: f64, upper: f64) -> FlatVar {
        FlatVar { name: name.into(), stage: Stage::Second, kind, lower, upper }
    }

    fn row(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> FlatRow {
        FlatRow { name: "r".into(), coeffs, sense, rhs, scope: StageScope::Coupled }
    }

    fn milp(vars: Vec<FlatVar>, rows: Vec<FlatRow>) -> FlatMilp {
        FlatMilp { scenario: "s".into(), vars, rows, objectives: vec![], objective_names: vec![] }
    }

    #[test]
    fn lp_two_variable_geometry() {
        let m = milp(
            vec![var("x", VarKind::Continuous, 0.0, f64::INFINITY), var("y", VarKind::Continuous, 0.0, f64::INFINITY)],
            vec![row(vec![(0, 1.0)], Sense::Le, 1.0), row(vec![(1, 1.0)], Sense::Le, 2.0)],
        );
        let obj = FlatExpr { coeffs: vec![(0, -1.0), (1, -1.0)], constant: 0.0 };
        let r = solve_lp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective_value + 3.0).abs() < 1e-9);
        assert!((r.assignment.0[0] - 1.0).abs() < 1e-9 && (r.assignment.0[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lp_lower_bound_row_and_infeasible() {
        let m = milp(vec![var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY)], vec![row(vec![(0, 1.0)], Sense::Ge, 5.0)]);
        let obj = FlatExpr { coeffs: vec![(0, 1.0)], constant: 0.0 };
        let r = solve_lp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective_value - 5.0).abs() < 1e-12);

        let m = milp(
            vec![var("x", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY)],
            vec![row(vec![(0, 1.0)], Sense::Le, 0.0), row(vec![(0, 1.0)], Sense::Ge, 1.0)],
        );
        let r = solve_lp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(!r.infeasible_rows.is_empty());
    }

    #[test]
    fn lp_unbounded() {
        let m = milp(vec![var("x", VarKind::Continuous, 0.0, f64::INFINITY)], vec![row(vec![(0, 1.0)], Sense::Ge, 1.0)]);
        let obj = FlatExpr { coeffs: vec![(0, -1.0)], constant: 0.0 };
        assert_eq!(solve_lp(&m, &obj, &SolverConfig::default()).status, SolveStatus::Unbounded);
    }

    #[test]
    fn knapsack_matches_enumeration() {
        // maximize 10a + 7b + 5c s.t. 4a + 3b + 2c <= 5
        let m = milp(
            vec![var("a", VarKind::Binary, 0.0, 1.0), var("b", VarKind::Binary, 0.0, 1.0), var("c", VarKind::Binary, 0.0, 1.0)],
            vec![row(vec![(0, 4.0), (1, 3.0), (2, 2.0)], Sense::Le, 5.0)],
        );
        let obj = FlatExpr { coeffs: vec![(0, -10.0), (1, -7.0), (2, -5.0)], constant: 0.0 };
        let r = solve_milp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective_value + 12.0).abs() < 1e-9);
        assert_eq!(r.assignment.0, vec![0.0, 1.0, 1.0]);
        assert!(r.stats.branched > 0);
    }

    #[test]
    fn fixed_variables_only() {
        let m = milp(
            vec![var("a", VarKind::Binary, 1.0, 1.0), var("x", VarKind::Continuous, 2.0, 2.0)],
            vec![row(vec![(0, 1.0), (1, 1.0)], Sense::Le, 3.0)],
        );
        let obj = FlatExpr { coeffs: vec![(0, 1.0), (1, 1.0)], constant: 0.5 };
        let r = solve_milp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective_value, 3.5);
        let tight = milp(m.vars.clone(), vec![row(vec![(0, 1.0), (1, 1.0)], Sense::Le, 2.5)]);
        assert_eq!(solve_milp(&tight, &obj, &SolverConfig::default()).status, SolveStatus::Infeasible);
    }

    #[test]
    fn integral_relaxation_needs_no_branching() {
        let m = milp(
            vec![var("a", VarKind::Binary, 0.0, 1.0), var("b", VarKind::Binary, 0.0, 1.0)],
            vec![row(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.0)],
        );
        let obj = FlatExpr { coeffs: vec![(0, 1.0), (1, 2.0)], constant: 0.0 };
        let r = solve_milp(&m, &obj, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.stats.branched, 0);
        assert_eq!(r.stats.nodes, 1);
        assert_eq!(r.objective_value, 1.0);
    }

    #[test]
    fn backend_parsing() {
        assert_eq!("embedded".parse::<Backend>().unwrap(), Backend::Embedded);
        assert_eq!(
            "lpfile:my-solver --quiet".parse::<Backend>().unwrap(),
            Backend::LpFile { command: vec!["my-solver".into(), "--quiet".into()] }
        );
        assert!("lpfile:".parse::<Backend>().is_err());
        assert!("cplex".parse::<Backend>().is_err());
    }

    #[test]
    fn solution_file_parsing() {
        let s = parse_solution("# status optimal\nx 1.5\n\ny -2e-3\n").unwrap();
        assert_eq!(s["x"], 1.5);
        assert_eq!(s["y"], -0.002);
        assert!(parse_solution("x\n").is_err());
        assert!(parse_solution("x abc\n").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { integrality_tol: 0.0, ..Default::default() }.validate().is_err());
    }
}
