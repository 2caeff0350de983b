use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use flexhand_core::dess::{build_dess, bundled_instance, DessInstance, DessModel};
use flexhand_core::flexhand::{
    anchor_deviation, attach_fronts, build_flexhand, build_robust_flexhand, cross_evaluate, design_cover, ideal_fronts, solve_flexhand,
    CrossEvaluation, FlexhandProblem, FlexhandSolution, ScenarioIdeal,
};
use flexhand_core::model::{Design, FlatMilp};
use flexhand_core::pareto::{fmt_num, ParetoFront};
use flexhand_core::selectors::compare_selectors;
use flexhand_core::solver::{export_lp_file, read_lp_file, write_solution, Backend, Solver, SolverConfig};
use log::info;
use serde_json::{json, Value};

use crate::output::{self, Writer};
use crate::{CliError, RunArgs};

struct Setup {
    dm: DessModel,
    component_ids: Vec<String>,
    scenarios: Vec<String>,
    solver: Solver,
    n: usize,
    out: Writer,
}

impl Setup {
    fn milp(&self, scenario: &str) -> Result<FlatMilp, CliError> {
        Ok(self.dm.model.instantiate(scenario)?)
    }

    fn ideals(&self) -> Result<Vec<ScenarioIdeal>, CliError> {
        Ok(ideal_fronts(&self.dm.model, &self.scenarios, self.n, &self.solver)?)
    }
}

fn solver(run: &RunArgs) -> Result<Solver, CliError> {
    let mut config = SolverConfig::default().with_gap(run.mip_gap);
    if let Some(n) = run.node_limit {
        config.node_limit = n;
    }
    if let Some(t) = run.time_limit {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::input("--time-limit must be positive"));
        }
        config.time_limit = Some(Duration::from_secs_f64(t));
    }
    config.validate()?;
    let backend: Backend = run.solver.parse()?;
    Ok(Solver { config, backend })
}

fn setup(run: &RunArgs) -> Result<Setup, CliError> {
    if run.points < 2 {
        return Err(CliError::input("--points must be at least 2"));
    }
    let mut inst = match &run.instance {
        Some(p) => DessInstance::load(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => bundled_instance(),
    };
    if !run.scenarios.is_empty() {
        inst.restrict_scenarios(&run.scenarios)?;
    }
    let dm = build_dess(&inst)?;
    let scenarios = dm.model.uncertainty_set().ids().into_iter().map(String::from).collect();
    Ok(Setup {
        component_ids: inst.components.iter().map(|c| c.id.clone()).collect(),
        dm,
        scenarios,
        solver: solver(run)?,
        n: run.points,
        out: Writer::new(&run.out, !run.no_header)?,
    })
}

pub fn ideal(run: &RunArgs) -> Result<u8, CliError> {
    let st = setup(run)?;
    for s in st.ideals()? {
        let milp = st.milp(&s.scenario)?;
        let names = &milp.objective_names;
        let csv = format!("ideal_{}.csv", s.scenario);
        st.out.fronts(&csv, &[(&s.front, Some(&s.ctx))], &milp.vars, names)?;
        let points: Vec<Value> = s
            .front
            .points
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let d = p.design(&milp.vars);
                json!({
                    "point": j,
                    "objectives": output::objectives(names, &p.objectives),
                    "objectives_norm": output::objectives(names, &s.ctx.normalize_point(&p.objectives)),
                    "capacities": output::capacities(&st.dm, &st.component_ids, &d),
                    "design": output::design_values(&milp.vars, &d),
                })
            })
            .collect();
        st.out.json(&format!("ideal_{}_designs.json", s.scenario), &json!({ "scenario": s.scenario, "points": points }))?;
        println!("{}: {} ideal points -> {csv}", s.scenario, s.front.len());
    }
    Ok(0)
}

struct Solved {
    problem: FlexhandProblem,
    solution: FlexhandSolution,
}

fn solve(st: &Setup, problem: FlexhandProblem, with_fronts: bool) -> Result<Solved, CliError> {
    let mut solution = solve_flexhand(&problem, &st.solver)?;
    if with_fronts {
        attach_fronts(&st.dm.model, &problem, &mut solution, st.n, &st.solver)?;
    }
    Ok(Solved { problem, solution })
}

/// Writes `<stem>.json`, `<prefix>_<s>.csv` per scenario and the anchor deviations.
fn write_solution_files(st: &Setup, prefix: &str, stem: &str, solved: &Solved) -> Result<(), CliError> {
    let sol = &solved.solution;
    let vars = &solved.problem.base_vars;
    let mut files = BTreeMap::new();
    let mut deviations = serde_json::Map::new();
    let mut dev_csv = String::from("scenario,objective,ideal_anchor,flexhand_anchor,relative_deviation\n");
    for ideal in &solved.problem.ideals {
        let s = &ideal.scenario;
        let names = st.milp(s)?.objective_names;
        let front = &sol.fronts[s];
        let name = format!("{prefix}_{s}.csv");
        st.out.fronts(&name, &[(&ideal.front, Some(&ideal.ctx)), (front, Some(&ideal.ctx))], vars, &names)?;
        files.insert(s.clone(), name);
        let dev = anchor_deviation(front, &ideal.front);
        for (i, d) in dev.iter().enumerate() {
            let best = |f: &ParetoFront| f.points.iter().map(|p| p.objectives[i]).fold(f64::INFINITY, f64::min);
            let _ = writeln!(dev_csv, "{s},{},{},{},{}", names[i], fmt_num(best(&ideal.front)), fmt_num(best(front)), fmt_num(*d));
        }
        deviations.insert(s.clone(), output::objectives(&names, &dev));
    }
    st.out.text(&format!("{stem}_anchor_deviation.csv"), &dev_csv)?;
    let report = json!({
        "scenarios": solved.problem.ideals.iter().map(|s| s.scenario.clone()).collect::<Vec<_>>(),
        "robust": solved.problem.robust,
        "epsilon_star": output::num(sol.epsilon_star),
        "optimal": sol.optimal,
        "capacities": output::capacities(&st.dm, &st.component_ids, &sol.design),
        "design": output::design_values(vars, &sol.design),
        "binding": sol.binding,
        "anchor_deviation": deviations,
        "fronts": output::fmt_map(&files),
    });
    st.out.json(&format!("{stem}.json"), &report)
}

fn exit_code(optimal: bool) -> u8 {
    if optimal {
        0
    } else {
        eprintln!("warning: solver limit reached; reported designs are incumbents");
        4
    }
}

pub fn flexhand(run: &RunArgs) -> Result<u8, CliError> {
    let st = setup(run)?;
    let mut optimal = true;
    for ideal in st.ideals()? {
        let s = ideal.scenario.clone();
        let solved = solve(&st, build_flexhand(&st.dm.model, &ideal)?, true)?;
        write_solution_files(&st, "flexhand", &format!("flexhand_{s}"), &solved)?;
        optimal &= solved.solution.optimal;
        println!("{s}: epsilon* = {} ({} front points) -> flexhand_{s}.json", fmt_num(solved.solution.epsilon_star), solved.solution.fronts[&s].len());
    }
    Ok(exit_code(optimal))
}

pub fn robust(run: &RunArgs) -> Result<u8, CliError> {
    let st = setup(run)?;
    let ideals = st.ideals()?;
    let robust = solve(&st, build_robust_flexhand(&st.dm.model, &ideals)?, true)?;
    write_solution_files(&st, "robust", "robust", &robust)?;
    let mut optimal = robust.solution.optimal;
    println!("robust {{{}}}: epsilon* = {} -> robust.json", st.scenarios.join(","), fmt_num(robust.solution.epsilon_star));

    // every single-scenario design and the robust design in every scenario
    let mut designs: Vec<(String, Design)> = Vec::new();
    for ideal in &ideals {
        let single = solve(&st, build_flexhand(&st.dm.model, ideal)?, false)?;
        optimal &= single.solution.optimal;
        designs.push((format!("flexhand_{}", ideal.scenario), single.solution.design));
    }
    designs.push(("robust".into(), robust.solution.design.clone()));
    let vars = &robust.problem.base_vars;
    let mut matrix = String::from("design,scenario,status,epsilon,violated\n");
    for (label, design) in &designs {
        let mut feasible_fronts = Vec::new();
        for ideal in &ideals {
            let s = &ideal.scenario;
            match cross_evaluate(&st.dm.model, design, s, st.n, &st.solver)? {
                CrossEvaluation::Front(f) => {
                    let eps = design_cover(&st.dm.model, design, ideal, &st.solver)?.epsilon;
                    let _ = writeln!(matrix, "{label},{s},feasible,{},", fmt_num(eps));
                    feasible_fronts.push((f, ideal));
                }
                CrossEvaluation::Infeasible(rep) => {
                    let why = if rep.first_stage_feasible { rep.violated.join(";") } else { format!("design: {}", rep.violated.join(";")) };
                    let _ = writeln!(matrix, "{label},{s},infeasible,,{}", why.replace(',', " "));
                }
            }
        }
        let fronts: Vec<_> = feasible_fronts.iter().map(|(f, i)| (f, Some(&i.ctx))).collect();
        let names = st.milp(&ideals[0].scenario)?.objective_names;
        st.out.fronts(&format!("cross_{label}.csv"), &fronts, vars, &names)?;
    }
    st.out.text("cross_evaluation.csv", &matrix)?;
    print!("{}", matrix);
    Ok(exit_code(optimal))
}

pub fn select(run: &RunArgs, weights: Option<&[f64]>) -> Result<u8, CliError> {
    let st = setup(run)?;
    let mut optimal = true;
    for ideal in st.ideals()? {
        let solved = solve(&st, build_flexhand(&st.dm.model, &ideal)?, false)?;
        optimal &= solved.solution.optimal;
        let table = compare_selectors(&st.dm.model, &ideal, &solved.solution, weights, &st.solver)?;
        st.out.text(&format!("selection_{}.csv", ideal.scenario), &table.to_csv())?;
        print!("{}", table.to_text());
    }
    Ok(exit_code(optimal))
}

pub fn export_lp(run: &RunArgs) -> Result<u8, CliError> {
    let st = setup(run)?;
    let lp = |name: String, milp: &FlatMilp, obj: usize| -> Result<(), CliError> {
        export_lp_file(milp, &milp.objectives[obj], &st.out.dir.join(&name))?;
        println!("{name}");
        Ok(())
    };
    for s in &st.scenarios {
        let milp = st.milp(s)?;
        for (i, name) in milp.objective_names.iter().enumerate() {
            lp(format!("model_{s}_{name}.lp"), &milp, i)?;
        }
    }
    let ideals = st.ideals()?;
    for ideal in &ideals {
        lp(format!("flexhand_{}.lp", ideal.scenario), &build_flexhand(&st.dm.model, ideal)?.milp, 0)?;
    }
    if ideals.len() > 1 {
        lp("robust.lp".into(), &build_robust_flexhand(&st.dm.model, &ideals)?.milp, 0)?;
    }
    Ok(0)
}

pub fn solve_lp(run: &RunArgs, model: &Path, solution: &Path) -> Result<u8, CliError> {
    let lp = read_lp_file(model)?;
    let res = flexhand_core::solver::solve_milp(&lp.milp, &lp.objective, &solver(run)?.config);
    info!("{}: {:?}, objective {}", model.display(), res.status, res.objective_value);
    if res.has_solution() {
        std::fs::write(solution, write_solution(&lp.milp, &res.assignment.0))
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", solution.display())))?;
    }
    Ok(0)
}
