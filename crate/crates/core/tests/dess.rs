use flexhand_core::dess::*;
use flexhand_core::flexhand::ideal_fronts;
use flexhand_core::model::{Assignment, Stage};
use flexhand_core::solver::{Solver, SolverConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solver() -> Solver {
    Solver::new(SolverConfig::default().with_gap(1e-9))
}

/// Investment straight from the breakpoint table.
fn hand_invest(spec: &ComponentSpec, gamma: &[f64], size: &[f64]) -> f64 {
    let b = &spec.segments;
    match spec.sizing {
        Sizing::Discrete => b.iter().zip(gamma).map(|(p, g)| g * p.cost_eur).sum(),
        Sizing::Continuous => (0..b.len() - 1)
            .map(|h| {
                let slope = (b[h + 1].cost_eur - b[h].cost_eur) / (b[h + 1].capacity_kw - b[h].capacity_kw);
                gamma[h] * b[h].cost_eur + slope * (size[h] - gamma[h] * b[h].capacity_kw)
            })
            .sum(),
    }
}

fn hand_objectives(inst: &DessInstance, dm: &DessModel, s: &ScenarioFactors, x: &[f64]) -> (f64, f64) {
    let tf = &inst.tariffs;
    let q = (1.0 + tf.interest).powf(tf.horizon_years);
    let annuity = q * tf.interest / (q - 1.0);
    let (mut tac, mut gwi) = (0.0, 0.0);
    for (t, ts) in inst.timesteps.iter().enumerate() {
        let gas_in: f64 = inst
            .components
            .iter()
            .zip(&dm.vars.components)
            .filter(|(c, _)| matches!(c.kind, ComponentKind::Boiler | ComponentKind::Chp))
            .map(|(_, v)| x[v.input[t].0])
            .sum();
        let (buy, sell) = (x[dm.vars.buy[t].0], x[dm.vars.sell[t].0]);
        tac += ts.duration_h
            * (gas_in * tf.gas_ct_per_kwh / 100.0 * s.gas + buy * tf.el_buy_ct_per_kwh / 100.0 * s.el_buy - sell * tf.el_sell_ct_per_kwh / 100.0 * s.el_sell);
        gwi += ts.duration_h * (gas_in * tf.gwi_gas_g_per_kwh / 1000.0 + (buy - sell) * tf.gwi_el_g_per_kwh / 1000.0 * s.gwi_el);
    }
    for (c, v) in inst.components.iter().zip(&dm.vars.components) {
        let g: Vec<f64> = v.gamma.iter().map(|j| x[j.0]).collect();
        let n: Vec<f64> = v.size.iter().map(|j| x[j.0]).collect();
        tac += (annuity + c.maintenance_share) * hand_invest(c, &g, &n);
    }
    (tac, gwi)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objectives_match_hand_expansion(seed in any::<u64>(), micro in any::<bool>()) {
        let inst = if micro { micro_instance() } else { bundled_instance() };
        let dm = build_dess(&inst).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = dm
            .model
            .variables()
            .iter()
            .map(|v| if v.upper <= 1.0 { rng.gen_range(0..=1) as f64 } else { rng.gen_range(0.0..5000.0) })
            .collect();
        for s in &inst.scenarios {
            let (tac, gwi) = hand_objectives(&inst, &dm, s, &x);
            let a = Assignment(x.clone());
            prop_assert!(rel(dm.model.evaluate(0, &a, &s.id).unwrap(), tac) < 1e-9);
            prop_assert!(rel(dm.model.evaluate(1, &a, &s.id).unwrap(), gwi) < 1e-9);
        }
    }
}

#[test]
fn gwi_has_no_first_stage_terms() {
    for inst in [bundled_instance(), micro_instance()] {
        let dm = build_dess(&inst).unwrap();
        let milp = dm.model.instantiate(&inst.scenarios[0].id).unwrap();
        assert_eq!(milp.objective_names, ["TAC", "GWI"]);
        assert!(milp.objectives[1].coeffs.iter().all(|&(j, _)| milp.vars[j].stage == Stage::Second));
        assert!(milp.objectives[0].coeffs.iter().any(|&(j, _)| milp.vars[j].stage == Stage::First));
    }
}

#[test]
fn solutions_respect_balances_segments_and_partload() {
    let inst = bundled_instance();
    let dm = build_dess(&inst).unwrap();
    let ids: Vec<String> = inst.scenarios.iter().map(|s| s.id.clone()).collect();
    for ideal in ideal_fronts(&dm.model, &ids, 6, &solver()).unwrap() {
        let milp = dm.model.instantiate(&ideal.scenario).unwrap();
        let f = inst.scenarios.iter().find(|s| s.id == ideal.scenario).unwrap();
        let max_demand = inst
            .timesteps
            .iter()
            .flat_map(|t| [t.heat_kw * f.heat, t.cool_a_kw * f.cool_a, t.cool_b_kw * f.cool_b, t.el_kw * f.el])
            .fold(0.0, f64::max);
        for p in &ideal.front.points {
            let x = &p.assignment.0;
            let balances: Vec<_> = milp.rows.iter().filter(|r| r.name.contains("_balance_")).collect();
            assert_eq!(balances.len(), 4 * inst.timesteps.len());
            for r in balances {
                assert!((r.activity(x) - r.rhs).abs() < 1e-7 * max_demand, "{}: residual {}", r.name, r.activity(x) - r.rhs);
            }
            for (c, v) in inst.components.iter().zip(&dm.vars.components) {
                let gamma: Vec<f64> = v.gamma.iter().map(|j| x[j.0]).collect();
                assert!(gamma.iter().sum::<f64>() <= 1.0 + 1e-9);
                let mut total = 0.0;
                for (g, s) in gamma.iter().zip(&v.size) {
                    if *g == 0.0 {
                        assert!(x[s.0].abs() < 1e-9, "{}: size without segment", c.id);
                    }
                    total += x[s.0];
                }
                // installed units run at least at minimal part load in every step
                for o in &v.output {
                    assert!(x[o.0] >= c.min_partload * total - 1e-6 * total.max(1.0), "{}: {} < {}", c.id, x[o.0], c.min_partload * total);
                }
            }
        }
    }
}

#[test]
fn scenarios_scale_demand_rows() {
    let inst = bundled_instance();
    let dm = build_dess(&inst).unwrap();
    let (lo, mid) = (dm.model.instantiate("xi1").unwrap(), dm.model.instantiate("xi2").unwrap());
    let heat = |m: &flexhand_core::model::FlatMilp| m.rows.iter().find(|r| r.name == "heat_balance_t0").unwrap().rhs;
    assert!((heat(&mid) - inst.timesteps[0].heat_kw).abs() < 1e-9);
    assert!((heat(&lo) - 0.8 * inst.timesteps[0].heat_kw).abs() < 1e-9);
}

#[test]
fn restricting_scenarios() {
    let mut inst = bundled_instance();
    inst.restrict_scenarios(&["xi3".into(), "xi1".into(), "xi3".into()]).unwrap();
    let ids: Vec<&str> = inst.scenarios.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["xi3", "xi1"]);
    assert!(inst.restrict_scenarios(&["nope".into()]).is_err());
}
