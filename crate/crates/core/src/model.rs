//! Scenario-parameterized two-stage MILPs.
//!
//! A [`TwoStageModel`] is assembled with a [`ModelBuilder`] and frozen by
//! [`ModelBuilder::finalize`]. Coefficients are affine in named parameters,
//! so one model describes every scenario of its [`UncertaintySet`];
//! [`TwoStageModel::instantiate`] resolves them into a [`FlatMilp`].

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Handle of a declared variable. Indexes [`TwoStageModel::variables`] and
/// every [`Assignment`] built for that model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

/// Handle of a declared parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Here-and-now decision, shared by every operating point.
    First,
    /// Wait-and-see decision, free to adapt per operating point and scenario.
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableDef {
    pub id: VarId,
    pub name: String,
    pub stage: Stage,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// How per-scenario entries of a [`Parameter`] are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamMode {
    /// Scenario value = nominal × entry.
    Multiplier,
    /// Scenario value = entry.
    Absolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub nominal: f64,
    pub mode: ParamMode,
    /// Empty for certain parameters, which resolve to `nominal` everywhere.
    pub per_scenario: BTreeMap<String, f64>,
}

impl Parameter {
    fn value_in(&self, scenario: &str) -> Option<f64> {
        if self.per_scenario.is_empty() {
            return Some(self.nominal);
        }
        self.per_scenario.get(scenario).map(|&v| match self.mode {
            ParamMode::Multiplier => self.nominal * v,
            ParamMode::Absolute => v,
        })
    }
}

/// A coefficient affine in the model parameters: `value + Σ factor·param`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coef {
    pub value: f64,
    pub params: Vec<(ParamId, f64)>,
}

impl Coef {
    pub fn param(p: ParamId) -> Self {
        Self::scaled(p, 1.0)
    }

    pub fn scaled(p: ParamId, factor: f64) -> Self {
        Coef { value: 0.0, params: vec![(p, factor)] }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.params.is_empty()
    }

    fn add_scaled(&mut self, other: &Coef, scale: f64) {
        self.value += scale * other.value;
        self.params.extend(other.params.iter().map(|&(p, f)| (p, f * scale)));
    }

    fn canonicalize(&mut self) {
        self.params.sort_by_key(|&(p, _)| p);
        let mut merged: Vec<(ParamId, f64)> = Vec::with_capacity(self.params.len());
        for &(p, f) in &self.params {
            match merged.last_mut() {
                Some((q, g)) if *q == p => *g += f,
                _ => merged.push((p, f)),
            }
        }
        merged.retain(|&(_, f)| f != 0.0);
        self.params = merged;
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.params.iter().all(|(_, f)| f.is_finite())
    }

    /// Resolves against a scenario's parameter table.
    pub fn resolve(&self, values: &[f64]) -> f64 {
        self.params.iter().fold(self.value, |acc, &(p, f)| acc + f * values[p.0])
    }
}

impl From<f64> for Coef {
    fn from(value: f64) -> Self {
        Coef { value, params: Vec::new() }
    }
}

impl From<ParamId> for Coef {
    fn from(p: ParamId) -> Self {
        Coef::param(p)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearExpr {
    pub terms: Vec<(VarId, Coef)>,
    pub constant: Coef,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, var: VarId, coef: impl Into<Coef>) -> Self {
        self.add_term(var, coef);
        self
    }

    pub fn add_term(&mut self, var: VarId, coef: impl Into<Coef>) {
        self.terms.push((var, coef.into()));
    }

    pub fn add_constant(&mut self, coef: impl Into<Coef>) {
        self.constant.add_scaled(&coef.into(), 1.0);
    }

    /// Adds `scale · other` to this expression.
    pub fn add_expr(&mut self, other: &LinearExpr, scale: f64) {
        for (v, c) in &other.terms {
            let mut scaled = Coef::default();
            scaled.add_scaled(c, scale);
            self.terms.push((*v, scaled));
        }
        self.constant.add_scaled(&other.constant, scale);
    }

    /// Sorts terms by variable, merges duplicates and drops zero coefficients.
    pub fn canonicalize(&mut self) {
        self.terms.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(VarId, Coef)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((w, d)) if *w == v => d.add_scaled(&c, 1.0),
                _ => merged.push((v, c)),
            }
        }
        for (_, c) in merged.iter_mut() {
            c.canonicalize();
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.terms = merged;
        self.constant.canonicalize();
    }

    fn resolve(&self, values: &[f64]) -> FlatExpr {
        let coeffs = self
            .terms
            .iter()
            .map(|(v, c)| (v.0, c.resolve(values)))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        FlatExpr { coeffs, constant: self.constant.resolve(values) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageScope {
    /// References first-stage variables only.
    FirstOnly,
    /// References at least one second-stage variable.
    Coupled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinearExpr,
    pub sense: Sense,
    pub rhs: Coef,
    pub scope: StageScope,
}

/// A minimized linear objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub index: usize,
    pub name: String,
    pub expr: LinearExpr,
}

impl Objective {
    pub fn evaluate(&self, assignment: &Assignment, scenario: &Scenario) -> Result<f64> {
        self.expr.resolve(&scenario.values).eval(&assignment.0)
    }
}

/// A scenario with every parameter resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    /// Indexed by [`ParamId`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet {
    scenarios: Vec<Scenario>,
}

impl UncertaintySet {
    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn get(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.scenarios.iter().map(|s| s.id.as_str()).collect()
    }
}

/// Values for every variable of a model, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Assignment(pub Vec<f64>);

impl Assignment {
    pub fn get(&self, var: VarId) -> Option<f64> {
        self.0.get(var.0).copied()
    }
}

/// Values of the first-stage variables only.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Design {
    pub values: BTreeMap<VarId, f64>,
}

impl Design {
    /// Restricts an assignment of `vars` to the first-stage variables.
    pub fn from_assignment(vars: &[FlatVar], assignment: &Assignment) -> Self {
        let values = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.stage == Stage::First)
            .filter_map(|(i, _)| assignment.0.get(i).map(|&x| (VarId(i), x)))
            .collect();
        Design { values }
    }

    /// Largest absolute difference over the union of both key sets.
    pub fn max_abs_diff(&self, other: &Design) -> f64 {
        let keys: HashSet<VarId> = self.values.keys().chain(other.values.keys()).copied().collect();
        keys.into_iter()
            .map(|k| {
                let a = self.values.get(&k).copied().unwrap_or(f64::NAN);
                let b = other.values.get(&k).copied().unwrap_or(f64::NAN);
                (a - b).abs()
            })
            .fold(0.0, |m: f64, d| if d.is_nan() { f64::INFINITY } else { m.max(d) })
    }
}

/// A finalized, immutable two-stage model.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageModel {
    variables: Vec<VariableDef>,
    parameters: Vec<Parameter>,
    constraints: Vec<Constraint>,
    objectives: Vec<Objective>,
    uncertainty: UncertaintySet,
}

impl TwoStageModel {
    pub fn variables(&self) -> &[VariableDef] {
        &self.variables
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn uncertainty_set(&self) -> &UncertaintySet {
        &self.uncertainty
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn scenario(&self, id: &str) -> Result<&Scenario> {
        self.uncertainty.get(id).ok_or_else(|| Error::UnknownScenario(id.to_string()))
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().find(|v| v.name == name).map(|v| v.id)
    }

    pub fn first_stage_vars(&self) -> impl Iterator<Item = &VariableDef> {
        self.variables.iter().filter(|v| v.stage == Stage::First)
    }

    /// Resolves every parameter reference for one scenario.
    pub fn instantiate(&self, scenario_id: &str) -> Result<FlatMilp> {
        let scenario = self.scenario(scenario_id)?;
        let values = &scenario.values;
        let vars = self
            .variables
            .iter()
            .map(|v| FlatVar {
                name: v.name.clone(),
                stage: v.stage,
                kind: v.kind,
                lower: v.lower,
                upper: v.upper,
            })
            .collect();
        let rows = self
            .constraints
            .iter()
            .map(|c| {
                let e = c.expr.resolve(values);
                FlatRow {
                    name: c.name.clone(),
                    coeffs: e.coeffs,
                    sense: c.sense,
                    rhs: c.rhs.resolve(values) - e.constant,
                    scope: c.scope,
                }
            })
            .collect();
        let objectives = self.objectives.iter().map(|o| o.expr.resolve(values)).collect();
        Ok(FlatMilp {
            scenario: scenario.id.clone(),
            vars,
            rows,
            objectives,
            objective_names: self.objectives.iter().map(|o| o.name.clone()).collect(),
        })
    }

    /// Objective value under `scenario`.
    pub fn evaluate(&self, objective: usize, assignment: &Assignment, scenario_id: &str) -> Result<f64> {
        let scenario = self.scenario(scenario_id)?;
        self.objectives
            .get(objective)
            .ok_or_else(|| Error::InvalidArgument(format!("no objective {objective}")))?
            .evaluate(assignment, scenario)
    }
}

/// Single-owner builder for [`TwoStageModel`].
#[derive(Debug, Default)]
pub struct ModelBuilder {
    variables: Vec<VariableDef>,
    parameters: Vec<Parameter>,
    constraints: Vec<(String, LinearExpr, Sense, Coef)>,
    objectives: Vec<(String, LinearExpr)>,
    scenarios: Vec<String>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        stage: Stage,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> VarId {
        let id = VarId(self.variables.len());
        self.variables.push(VariableDef { id, name: name.into(), stage, kind, lower, upper });
        id
    }

    pub fn continuous(&mut self, name: impl Into<String>, stage: Stage, lower: f64, upper: f64) -> VarId {
        self.add_variable(name, stage, VarKind::Continuous, lower, upper)
    }

    pub fn binary(&mut self, name: impl Into<String>, stage: Stage) -> VarId {
        self.add_variable(name, stage, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_parameter(&mut self, name: impl Into<String>, nominal: f64, mode: ParamMode) -> ParamId {
        let id = ParamId(self.parameters.len());
        self.parameters.push(Parameter {
            name: name.into(),
            nominal,
            mode,
            per_scenario: BTreeMap::new(),
        });
        id
    }

    pub fn set_scenario_value(&mut self, param: ParamId, scenario: impl Into<String>, value: f64) {
        self.parameters[param.0].per_scenario.insert(scenario.into(), value);
    }

    pub fn add_scenario(&mut self, id: impl Into<String>) {
        self.scenarios.push(id.into());
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinearExpr,
        sense: Sense,
        rhs: impl Into<Coef>,
    ) {
        self.constraints.push((name.into(), expr, sense, rhs.into()));
    }

    pub fn add_objective(&mut self, name: impl Into<String>, expr: LinearExpr) {
        self.objectives.push((name.into(), expr));
    }

    /// Validates and freezes the model. A builder without scenarios gets a
    /// single scenario named `nominal`.
    pub fn finalize(mut self) -> Result<TwoStageModel> {
        if self.scenarios.is_empty() {
            self.scenarios.push("nominal".to_string());
        }
        let mut seen = HashSet::new();
        for s in &self.scenarios {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate scenario `{s}`")));
            }
        }

        let mut names = HashSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate variable `{}`", v.name)));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(Error::InvalidModel(format!("variable `{}` has empty bounds", v.name)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(Error::InvalidModel(format!("binary `{}` has bounds outside [0,1]", v.name)));
            }
        }
        if !self.variables.iter().any(|v| v.stage == Stage::First)
            || !self.variables.iter().any(|v| v.stage == Stage::Second)
        {
            return Err(Error::InvalidModel(
                "need at least one first-stage and one second-stage variable".into(),
            ));
        }
        if self.objectives.is_empty() {
            return Err(Error::InvalidModel("no objectives".into()));
        }

        for p in &self.parameters {
            if let Some(s) = p.per_scenario.keys().find(|s| !seen.contains(s.as_str())) {
                return Err(Error::InvalidModel(format!(
                    "parameter `{}` refers to unknown scenario `{s}`",
                    p.name
                )));
            }
        }
        let mut scenarios = Vec::with_capacity(self.scenarios.len());
        for id in &self.scenarios {
            let values = self
                .parameters
                .iter()
                .map(|p| {
                    p.value_in(id).ok_or_else(|| Error::UnresolvedParameter {
                        param: p.name.clone(),
                        scenario: id.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            scenarios.push(Scenario { id: id.clone(), values });
        }

        let nvars = self.variables.len();
        let nparams = self.parameters.len();
        let check = |what: &str, e: &LinearExpr| -> Result<()> {
            for (v, c) in &e.terms {
                if v.0 >= nvars {
                    return Err(Error::InvalidModel(format!("{what} references undeclared variable {}", v.0)));
                }
                check_coef(what, c, nparams)?;
            }
            check_coef(what, &e.constant, nparams)
        };

        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (name, mut expr, sense, mut rhs) in self.constraints {
            check(&name, &expr)?;
            check_coef(&name, &rhs, nparams)?;
            expr.canonicalize();
            rhs.canonicalize();
            let scope = if expr.terms.iter().all(|(v, _)| self.variables[v.0].stage == Stage::First) {
                StageScope::FirstOnly
            } else {
                StageScope::Coupled
            };
            constraints.push(Constraint { name, expr, sense, rhs, scope });
        }
        let mut objectives = Vec::with_capacity(self.objectives.len());
        for (index, (name, mut expr)) in self.objectives.into_iter().enumerate() {
            check(&name, &expr)?;
            expr.canonicalize();
            objectives.push(Objective { index, name, expr });
        }

        Ok(TwoStageModel {
            variables: self.variables,
            parameters: self.parameters,
            constraints,
            objectives,
            uncertainty: UncertaintySet { scenarios },
        })
    }
}

fn check_coef(what: &str, c: &Coef, nparams: usize) -> Result<()> {
    if !c.is_finite() {
        return Err(Error::InvalidModel(format!("{what} has a non-finite coefficient")));
    }
    if let Some((p, _)) = c.params.iter().find(|(p, _)| p.0 >= nparams) {
        return Err(Error::InvalidModel(format!("{what} references undeclared parameter {}", p.0)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatVar {
    pub name: String,
    pub stage: Stage,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl FlatVar {
    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }
}

/// A scenario-resolved linear expression over flat variable indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlatExpr {
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl FlatExpr {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.coeffs.iter().try_fold(self.constant, |acc, &(j, a)| {
            x.get(j).map(|v| acc + a * v).ok_or(Error::MissingValue(j))
        })
    }

    /// Evaluation for callers that already guarantee a complete assignment.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().fold(self.constant, |acc, &(j, a)| acc + a * x[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatRow {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub scope: StageScope,
}

impl FlatRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let r = self.activity(x);
        match self.sense {
            Sense::Le => (r - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - r).max(0.0),
            Sense::Eq => (r - self.rhs).abs(),
        }
    }
}

/// A single-scenario multi-objective MILP.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMilp {
    pub scenario: String,
    pub vars: Vec<FlatVar>,
    pub rows: Vec<FlatRow>,
    pub objectives: Vec<FlatExpr>,
    pub objective_names: Vec<String>,
}

/// Relative tolerance used when checking designs and assignments.
pub const FEASIBILITY_CHECK_TOL: f64 = 1e-6;

impl FlatMilp {
    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    /// Variables still free to move (not fixed by their bounds).
    pub fn decision_vars(&self, stage: Stage) -> usize {
        self.vars.iter().filter(|v| v.stage == stage && !v.is_fixed()).count()
    }

    pub fn objective_values(&self, x: &[f64]) -> Vec<f64> {
        self.objectives.iter().map(|o| o.value(x)).collect()
    }

    /// Names of rows or bounds violated by `x` beyond a relative tolerance.
    pub fn violations(&self, x: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (v, &val) in self.vars.iter().zip(x) {
            if val < v.lower - tol * (1.0 + v.lower.abs()) || val > v.upper + tol * (1.0 + v.upper.abs()) {
                out.push(format!("bound of {}", v.name));
            }
        }
        for r in &self.rows {
            if r.violation(x) > tol * (1.0 + r.rhs.abs()) {
                out.push(r.name.clone());
            }
        }
        out
    }

    /// Fixes every first-stage variable to its design value.
    ///
    /// First-stage columns are substituted into right-hand sides and
    /// objective constants and their bounds collapse to the design value.
    /// First-only rows are checked against the design and then dropped.
    pub fn fix_first_stage(&self, design: &Design) -> Result<FlatMilp> {
        let mut vars = self.vars.clone();
        let mut fixed: Vec<Option<f64>> = vec![None; vars.len()];
        for (j, v) in vars.iter_mut().enumerate() {
            if v.stage != Stage::First {
                continue;
            }
            let mut val = *design
                .values
                .get(&VarId(j))
                .ok_or_else(|| Error::MissingDesignValue(v.name.clone()))?;
            let tol = FEASIBILITY_CHECK_TOL;
            if !val.is_finite()
                || val < v.lower - tol * (1.0 + v.lower.abs())
                || val > v.upper + tol * (1.0 + v.upper.abs())
            {
                return Err(Error::InfeasibleDesign(format!("{} = {val} outside its bounds", v.name)));
            }
            if v.kind == VarKind::Binary {
                let r = val.round();
                if (val - r).abs() > tol {
                    return Err(Error::InfeasibleDesign(format!("{} = {val} is not binary", v.name)));
                }
                val = r;
            }
            val = val.clamp(v.lower, v.upper);
            v.lower = val;
            v.upper = val;
            fixed[j] = Some(val);
        }

        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut rhs = row.rhs;
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            for &(j, a) in &row.coeffs {
                match fixed[j] {
                    Some(val) => rhs -= a * val,
                    None => coeffs.push((j, a)),
                }
            }
            if coeffs.is_empty() {
                let viol = match row.sense {
                    Sense::Le => (-rhs).max(0.0),
                    Sense::Ge => rhs.max(0.0),
                    Sense::Eq => rhs.abs(),
                };
                if viol > FEASIBILITY_CHECK_TOL * (1.0 + row.rhs.abs()) {
                    return Err(Error::InfeasibleDesign(format!("violates `{}`", row.name)));
                }
                continue;
            }
            rows.push(FlatRow { name: row.name.clone(), coeffs, sense: row.sense, rhs, scope: row.scope });
        }

        let objectives = self
            .objectives
            .iter()
            .map(|o| {
                let mut constant = o.constant;
                let mut coeffs = Vec::with_capacity(o.coeffs.len());
                for &(j, a) in &o.coeffs {
                    match fixed[j] {
                        Some(val) => constant += a * val,
                        None => coeffs.push((j, a)),
                    }
                }
                FlatExpr { coeffs, constant }
            })
            .collect();

        Ok(FlatMilp {
            scenario: self.scenario.clone(),
            vars,
            rows,
            objectives,
            objective_names: self.objective_names.clone(),
        })
    }
}
