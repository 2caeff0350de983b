//! Distributed energy supply system: boilers, CHP engines, absorption and
//! compression chillers sized in the first stage and dispatched per time
//! step in the second. Objectives are total annualized costs (€/a) and
//! global warming impact (kg CO2-eq./a).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coef, LinearExpr, ModelBuilder, ParamId, ParamMode, Sense, Stage, TwoStageModel, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Boiler,
    Chp,
    AbsorptionChiller,
    CompressionChiller,
}

impl ComponentKind {
    fn is_heater(self) -> bool {
        matches!(self, ComponentKind::Boiler | ComponentKind::Chp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
    #[serde(rename = "shared")]
    Shared,
}

/// How capacity breakpoints are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sizing {
    /// Consecutive breakpoints bound linear cost segments.
    #[default]
    Continuous,
    /// Every breakpoint is a fixed size option at its cost.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Breakpoint {
    pub capacity_kw: f64,
    pub cost_eur: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub id: String,
    pub kind: ComponentKind,
    pub site: Site,
    pub thermal_efficiency: f64,
    #[serde(default)]
    pub electrical_efficiency: f64,
    pub min_partload: f64,
    pub maintenance_share: f64,
    pub segments: Vec<Breakpoint>,
    #[serde(default)]
    pub sizing: Sizing,
}

impl ComponentSpec {
    /// (lower capacity, upper capacity, cost at lower, gradient) per segment.
    fn pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        match self.sizing {
            Sizing::Discrete => self.segments.iter().map(|b| (b.capacity_kw, b.capacity_kw, b.cost_eur, 0.0)).collect(),
            Sizing::Continuous => (0..self.segments.len() - 1)
                .map(|h| {
                    let (lo, hi) = (self.segments[h], self.segments[h + 1]);
                    (lo.capacity_kw, hi.capacity_kw, lo.cost_eur, segment_gradient(self, h).unwrap_or(0.0))
                })
                .collect(),
        }
    }

    pub fn max_capacity(&self) -> f64 {
        self.segments.iter().map(|b| b.capacity_kw).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInstance(format!("component `{}`: {msg}", self.id)));
        let min_points = if self.sizing == Sizing::Continuous { 2 } else { 1 };
        if self.segments.len() < min_points {
            return bad("needs at least one segment");
        }
        for w in self.segments.windows(2) {
            if w[1].capacity_kw <= w[0].capacity_kw {
                return bad("breakpoints must be strictly increasing");
            }
            if w[1].cost_eur < w[0].cost_eur {
                return bad("costs must be non-decreasing");
            }
        }
        if self.segments.iter().any(|b| !(b.capacity_kw >= 0.0 && b.cost_eur >= 0.0 && b.capacity_kw.is_finite() && b.cost_eur.is_finite())) {
            return bad("capacities and costs must be finite and non-negative");
        }
        let eta_max = if self.kind == ComponentKind::CompressionChiller { 8.0 } else { 1.2 };
        if !(self.thermal_efficiency > 0.0 && self.thermal_efficiency <= eta_max) {
            return bad("thermal efficiency out of range");
        }
        if self.kind == ComponentKind::Chp {
            if !(self.electrical_efficiency > 0.0 && self.thermal_efficiency + self.electrical_efficiency <= 1.2) {
                return bad("electrical efficiency out of range");
            }
        } else if self.electrical_efficiency != 0.0 {
            return bad("only CHP engines have an electrical efficiency");
        }
        if !(self.min_partload > 0.0 && self.min_partload < 1.0) {
            return bad("minimal part load must lie in (0, 1)");
        }
        if !(self.maintenance_share >= 0.0 && self.maintenance_share.is_finite()) {
            return bad("maintenance share must be non-negative");
        }
        match (self.kind.is_heater(), self.site) {
            (true, Site::Shared) | (false, Site::A) | (false, Site::B) => Ok(()),
            (true, _) => bad("boilers and CHP engines must be on the shared site"),
            (false, _) => bad("chillers must serve site A or B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeStep {
    pub duration_h: f64,
    pub heat_kw: f64,
    pub cool_a_kw: f64,
    pub cool_b_kw: f64,
    pub el_kw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tariffs {
    pub gas_ct_per_kwh: f64,
    pub el_buy_ct_per_kwh: f64,
    pub el_sell_ct_per_kwh: f64,
    pub gwi_gas_g_per_kwh: f64,
    pub gwi_el_g_per_kwh: f64,
    pub interest: f64,
    pub horizon_years: f64,
}

fn one() -> f64 {
    1.0
}

/// Multipliers applied to the nominal data in one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFactors {
    pub id: String,
    #[serde(default = "one")]
    pub gas: f64,
    #[serde(default = "one")]
    pub el_buy: f64,
    #[serde(default = "one")]
    pub el_sell: f64,
    #[serde(default = "one")]
    pub gwi_el: f64,
    #[serde(default = "one")]
    pub heat: f64,
    #[serde(default = "one")]
    pub cool_a: f64,
    #[serde(default = "one")]
    pub cool_b: f64,
    #[serde(default = "one")]
    pub el: f64,
}

impl ScenarioFactors {
    fn all(&self) -> [f64; 8] {
        [self.gas, self.el_buy, self.el_sell, self.gwi_el, self.heat, self.cool_a, self.cool_b, self.el]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DessInstance {
    pub components: Vec<ComponentSpec>,
    pub timesteps: Vec<TimeStep>,
    pub tariffs: Tariffs,
    #[serde(default)]
    pub scenarios: Vec<ScenarioFactors>,
}

impl DessInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: DessInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Keeps only the listed scenarios, in the given order; duplicates collapse.
    pub fn restrict_scenarios(&mut self, ids: &[String]) -> Result<()> {
        let mut kept = Vec::new();
        for id in ids {
            if kept.iter().any(|s: &ScenarioFactors| &s.id == id) {
                continue;
            }
            let s = self.scenarios.iter().find(|s| &s.id == id).ok_or_else(|| Error::UnknownScenario(id.clone()))?;
            kept.push(s.clone());
        }
        self.scenarios = kept;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.components.is_empty() {
            return bad("no components".into());
        }
        if self.timesteps.is_empty() {
            return bad("no time steps".into());
        }
        for (i, c) in self.components.iter().enumerate() {
            c.validate()?;
            if self.components[..i].iter().any(|d| d.id == c.id) {
                return bad(format!("duplicate component id `{}`", c.id));
            }
        }
        for (t, ts) in self.timesteps.iter().enumerate() {
            if !(ts.duration_h > 0.0 && ts.duration_h.is_finite()) {
                return bad(format!("time step {t}: duration must be positive"));
            }
            let demands = [ts.heat_kw, ts.cool_a_kw, ts.cool_b_kw, ts.el_kw];
            if demands.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
                return bad(format!("time step {t}: demands must be non-negative"));
            }
        }
        let tf = &self.tariffs;
        let values = [
            tf.gas_ct_per_kwh,
            tf.el_buy_ct_per_kwh,
            tf.el_sell_ct_per_kwh,
            tf.gwi_gas_g_per_kwh,
            tf.gwi_el_g_per_kwh,
        ];
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return bad("tariffs must be non-negative".into());
        }
        if tf.el_sell_ct_per_kwh > tf.el_buy_ct_per_kwh {
            return bad("electricity sell price exceeds buy price".into());
        }
        if !(tf.interest > 0.0) || !(tf.horizon_years >= 1.0) {
            return bad("interest must be positive and the horizon at least one year".into());
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if s.all().iter().any(|f| !(*f > 0.0 && f.is_finite())) {
                return bad(format!("scenario `{}`: factors must be positive", s.id));
            }
            if self.scenarios[..i].iter().any(|o| o.id == s.id) {
                return bad(format!("duplicate scenario `{}`", s.id));
            }
        }
        self.screen()
    }

    /// Rejects demands that no installed component could ever serve.
    fn screen(&self) -> Result<()> {
        let has = |pred: &dyn Fn(&ComponentSpec) -> bool| self.components.iter().any(pred);
        let needs = |f: &dyn Fn(&TimeStep) -> f64| self.timesteps.iter().any(|t| f(t) > 0.0);
        let cool_a = has(&|c| !c.kind.is_heater() && c.site == Site::A);
        let cool_b = has(&|c| !c.kind.is_heater() && c.site == Site::B);
        if needs(&|t| t.cool_a_kw) && !cool_a {
            return Err(Error::InvalidInstance("cooling demand at site A but no chiller there".into()));
        }
        if needs(&|t| t.cool_b_kw) && !cool_b {
            return Err(Error::InvalidInstance("cooling demand at site B but no chiller there".into()));
        }
        let absorption = has(&|c| c.kind == ComponentKind::AbsorptionChiller);
        if (needs(&|t| t.heat_kw) || absorption) && !has(&|c| c.kind.is_heater()) {
            return Err(Error::InvalidInstance("heat demand but no boiler or CHP engine".into()));
        }
        Ok(())
    }
}

/// Present value factor `((1+i)^h - 1) / ((1+i)^h i)`.
pub fn pvf(i: f64, h: f64) -> Result<f64> {
    if !(i > 0.0) || !(h >= 1.0) {
        return Err(Error::InvalidArgument(format!("present value factor needs i > 0 and h >= 1, got i={i}, h={h}")));
    }
    let q = (1.0 + i).powf(h);
    Ok((q - 1.0) / (q * i))
}

/// Cost slope (€/kW) of segment `h`, between breakpoints `h` and `h+1`.
pub fn segment_gradient(spec: &ComponentSpec, h: usize) -> Result<f64> {
    let (lo, hi) = match (spec.segments.get(h), spec.segments.get(h + 1)) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::InvalidArgument(format!("component `{}` has no segment {h}", spec.id))),
    };
    let width = hi.capacity_kw - lo.capacity_kw;
    if width <= 0.0 {
        return Err(Error::InvalidInstance(format!("component `{}`: segment {h} has zero width", spec.id)));
    }
    Ok((hi.cost_eur - lo.cost_eur) / width)
}

/// Scenario-dependent parameters (all multipliers of nominal data).
#[derive(Debug, Clone, Copy)]
pub struct DessParams {
    pub gas_price: ParamId,
    pub el_buy_price: ParamId,
    pub el_sell_price: ParamId,
    pub gwi_el: ParamId,
    pub heat: ParamId,
    pub cool_a: ParamId,
    pub cool_b: ParamId,
    pub el: ParamId,
}

#[derive(Debug, Clone)]
pub struct ComponentVars {
    pub gamma: Vec<VarId>,
    pub size: Vec<VarId>,
    pub input: Vec<VarId>,
    pub output: Vec<VarId>,
    pub el_output: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct DessVars {
    pub components: Vec<ComponentVars>,
    pub buy: Vec<VarId>,
    pub sell: Vec<VarId>,
}

fn add_params(b: &mut ModelBuilder, inst: &DessInstance) -> DessParams {
    let tf = &inst.tariffs;
    let names = ["gas_price", "el_buy_price", "el_sell_price", "gwi_el", "heat_demand", "cool_a_demand", "cool_b_demand", "el_demand"];
    // prices in €/kWh, grid GWI in kg/kWh; demand parameters are unit factors
    let nominal = [
        tf.gas_ct_per_kwh / 100.0,
        tf.el_buy_ct_per_kwh / 100.0,
        tf.el_sell_ct_per_kwh / 100.0,
        tf.gwi_el_g_per_kwh / 1000.0,
        1.0,
        1.0,
        1.0,
        1.0,
    ];
    let ids: Vec<ParamId> = names.iter().zip(nominal).map(|(n, v)| b.add_parameter(*n, v, ParamMode::Multiplier)).collect();
    for s in &inst.scenarios {
        b.add_scenario(s.id.clone());
        for (p, f) in ids.iter().zip(s.all()) {
            b.set_scenario_value(*p, s.id.clone(), f);
        }
    }
    DessParams {
        gas_price: ids[0],
        el_buy_price: ids[1],
        el_sell_price: ids[2],
        gwi_el: ids[3],
        heat: ids[4],
        cool_a: ids[5],
        cool_b: ids[6],
        el: ids[7],
    }
}

fn add_vars(b: &mut ModelBuilder, inst: &DessInstance) -> DessVars {
    let nt = inst.timesteps.len();
    let components = inst
        .components
        .iter()
        .map(|c| {
            let pieces = c.pieces();
            let gamma = (0..pieces.len()).map(|h| b.binary(format!("gamma_{}_{h}", c.id), Stage::First)).collect();
            let size = pieces
                .iter()
                .enumerate()
                .map(|(h, p)| b.continuous(format!("VN_{}_{h}", c.id), Stage::First, 0.0, p.1))
                .collect();
            let cap = c.max_capacity();
            let input = (0..nt)
                .map(|t| b.continuous(format!("U_{}_t{t}", c.id), Stage::Second, 0.0, cap / c.thermal_efficiency))
                .collect();
            let output = (0..nt).map(|t| b.continuous(format!("V_{}_t{t}", c.id), Stage::Second, 0.0, cap)).collect();
            let el_output = if c.kind == ComponentKind::Chp {
                let ub = cap * c.electrical_efficiency / c.thermal_efficiency;
                (0..nt).map(|t| b.continuous(format!("Vel_{}_t{t}", c.id), Stage::Second, 0.0, ub)).collect()
            } else {
                Vec::new()
            };
            ComponentVars { gamma, size, input, output, el_output }
        })
        .collect();
    let buy = (0..nt).map(|t| b.continuous(format!("buy_t{t}"), Stage::Second, 0.0, f64::INFINITY)).collect();
    let sell = (0..nt).map(|t| b.continuous(format!("sell_t{t}"), Stage::Second, 0.0, f64::INFINITY)).collect();
    DessVars { components, buy, sell }
}

fn installed(v: &ComponentVars) -> LinearExpr {
    let mut e = LinearExpr::new();
    for &s in &v.size {
        e.add_term(s, 1.0);
    }
    e
}

/// `INVEST_k = Σ_h [γ_kh κ_kh + m_kh (V̇N_kh − γ_kh V̇N,lb_kh)]`.
pub fn invest_expression(spec: &ComponentSpec, v: &ComponentVars) -> LinearExpr {
    let mut e = LinearExpr::new();
    for (h, (lo, _, cost, m)) in spec.pieces().into_iter().enumerate() {
        e.add_term(v.gamma[h], cost - m * lo);
        e.add_term(v.size[h], m);
    }
    e.canonicalize();
    e
}

pub fn tac_expression(vars: &DessVars, inst: &DessInstance, params: &DessParams) -> Result<LinearExpr> {
    let annuity = 1.0 / pvf(inst.tariffs.interest, inst.tariffs.horizon_years)?;
    let mut e = LinearExpr::new();
    for (t, ts) in inst.timesteps.iter().enumerate() {
        for (c, v) in inst.components.iter().zip(&vars.components) {
            if c.kind.is_heater() {
                e.add_term(v.input[t], Coef::scaled(params.gas_price, ts.duration_h));
            }
        }
        e.add_term(vars.buy[t], Coef::scaled(params.el_buy_price, ts.duration_h));
        e.add_term(vars.sell[t], Coef::scaled(params.el_sell_price, -ts.duration_h));
    }
    for (c, v) in inst.components.iter().zip(&vars.components) {
        e.add_expr(&invest_expression(c, v), annuity + c.maintenance_share);
    }
    e.canonicalize();
    Ok(e)
}

pub fn gwi_expression(vars: &DessVars, inst: &DessInstance, params: &DessParams) -> LinearExpr {
    let gas = inst.tariffs.gwi_gas_g_per_kwh / 1000.0;
    let mut e = LinearExpr::new();
    for (t, ts) in inst.timesteps.iter().enumerate() {
        for (c, v) in inst.components.iter().zip(&vars.components) {
            if c.kind.is_heater() {
                e.add_term(v.input[t], ts.duration_h * gas);
            }
        }
        e.add_term(vars.buy[t], Coef::scaled(params.gwi_el, ts.duration_h));
        e.add_term(vars.sell[t], Coef::scaled(params.gwi_el, -ts.duration_h));
    }
    e.canonicalize();
    e
}

/// Model plus handles to its variables and parameters.
#[derive(Debug, Clone)]
pub struct DessModel {
    pub model: TwoStageModel,
    pub vars: DessVars,
    pub params: DessParams,
}

pub fn build_dess(inst: &DessInstance) -> Result<DessModel> {
    inst.validate()?;
    let mut b = ModelBuilder::new();
    let params = add_params(&mut b, inst);
    let vars = add_vars(&mut b, inst);

    for (c, v) in inst.components.iter().zip(&vars.components) {
        let mut one_segment = LinearExpr::new();
        for (h, (lo, hi, _, _)) in c.pieces().into_iter().enumerate() {
            one_segment.add_term(v.gamma[h], 1.0);
            b.add_constraint(format!("size_lb_{}_{h}", c.id), LinearExpr::new().term(v.size[h], 1.0).term(v.gamma[h], -lo), Sense::Ge, 0.0);
            b.add_constraint(format!("size_ub_{}_{h}", c.id), LinearExpr::new().term(v.size[h], 1.0).term(v.gamma[h], -hi), Sense::Le, 0.0);
        }
        b.add_constraint(format!("one_segment_{}", c.id), one_segment, Sense::Le, 1.0);
        for t in 0..inst.timesteps.len() {
            let mut lo = LinearExpr::new().term(v.output[t], 1.0);
            lo.add_expr(&installed(v), -c.min_partload);
            b.add_constraint(format!("partload_min_{}_t{t}", c.id), lo, Sense::Ge, 0.0);
            let mut hi = LinearExpr::new().term(v.output[t], 1.0);
            hi.add_expr(&installed(v), -1.0);
            b.add_constraint(format!("partload_max_{}_t{t}", c.id), hi, Sense::Le, 0.0);
            b.add_constraint(
                format!("efficiency_{}_t{t}", c.id),
                LinearExpr::new().term(v.output[t], 1.0).term(v.input[t], -c.thermal_efficiency),
                Sense::Eq,
                0.0,
            );
            if c.kind == ComponentKind::Chp {
                let total = c.thermal_efficiency + c.electrical_efficiency;
                b.add_constraint(
                    format!("chp_el_{}_t{t}", c.id),
                    LinearExpr::new().term(v.el_output[t], 1.0).term(v.input[t], -total).term(v.output[t], 1.0),
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }

    for (t, ts) in inst.timesteps.iter().enumerate() {
        let mut heat = LinearExpr::new();
        let mut cool_a = LinearExpr::new();
        let mut cool_b = LinearExpr::new();
        let mut el = LinearExpr::new().term(vars.buy[t], 1.0).term(vars.sell[t], -1.0);
        for (c, v) in inst.components.iter().zip(&vars.components) {
            match c.kind {
                ComponentKind::Boiler => heat.add_term(v.output[t], 1.0),
                ComponentKind::Chp => {
                    heat.add_term(v.output[t], 1.0);
                    el.add_term(v.el_output[t], 1.0);
                }
                ComponentKind::AbsorptionChiller => heat.add_term(v.input[t], -1.0),
                ComponentKind::CompressionChiller => el.add_term(v.input[t], -1.0),
            }
            match (c.kind.is_heater(), c.site) {
                (false, Site::A) => cool_a.add_term(v.output[t], 1.0),
                (false, Site::B) => cool_b.add_term(v.output[t], 1.0),
                _ => {}
            }
        }
        b.add_constraint(format!("heat_balance_t{t}"), heat, Sense::Eq, Coef::scaled(params.heat, ts.heat_kw));
        b.add_constraint(format!("cool_balance_A_t{t}"), cool_a, Sense::Eq, Coef::scaled(params.cool_a, ts.cool_a_kw));
        b.add_constraint(format!("cool_balance_B_t{t}"), cool_b, Sense::Eq, Coef::scaled(params.cool_b, ts.cool_b_kw));
        b.add_constraint(format!("el_balance_t{t}"), el, Sense::Eq, Coef::scaled(params.el, ts.el_kw));
    }

    b.add_objective("TAC", tac_expression(&vars, inst, &params)?);
    b.add_objective("GWI", gwi_expression(&vars, inst, &params));
    Ok(DessModel { model: b.finalize()?, vars, params })
}

pub fn build_dess_model(inst: &DessInstance) -> Result<TwoStageModel> {
    Ok(build_dess(inst)?.model)
}

/// Synthetic four-period instance with three scenarios.
pub const BUNDLED_INSTANCE: &str = include_str!("../data/bundled.json");

/// Two discrete-size components, two periods, used for exhaustive checks.
pub const MICRO_INSTANCE: &str = include_str!("../data/micro.json");

pub fn bundled_instance() -> DessInstance {
    DessInstance::from_json(BUNDLED_INSTANCE).expect("bundled instance is valid")
}

pub fn micro_instance() -> DessInstance {
    DessInstance::from_json(MICRO_INSTANCE).expect("micro instance is valid")
}
