use std::collections::BTreeMap;
use std::path::Path;

use efx_core::envy::{best_removal_good, is_efx};
use efx_core::format::read_instance;
use efx_core::gen::{generate, GenParams};
use efx_core::hunt::{hunt, HuntConfig};
use efx_core::oracle::{cross_validate, exists_efx_bruteforce, OracleTables, DEFAULT_ORACLE_CAP};
use efx_core::solver::{Solver, Step};
use efx_core::{
    solve, Agent, Allocation, Bundle, CaseLabel, EfxError, Instance, Solution, SolverConfig,
    Valuation, Value,
};

fn three_agents(a: &[Value], b: &[Value], c: &[Value]) -> Instance {
    let mut vals = BTreeMap::new();
    for (id, w) in [("A", a), ("B", b), ("C", c)] {
        vals.insert(id.to_string(), Valuation::additive(w.to_vec()).unwrap());
    }
    let agents = ["A", "B", "C"]
        .iter()
        .enumerate()
        .map(|(i, id)| Agent {
            name: format!("p{i}"),
            valuation: id.to_string(),
        })
        .collect();
    Instance::new(a.len(), agents, vals).unwrap()
}

fn oracle_accepts(inst: &Instance, x: &Allocation) -> bool {
    OracleTables::new(inst).unwrap().accepts(&x.per_agent())
}

fn fixture(name: &str) -> Instance {
    read_instance(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name),
    )
    .unwrap()
}

fn perturbing() -> SolverConfig {
    SolverConfig {
        auto_perturb: true,
        ..SolverConfig::default()
    }
}

#[test]
fn c1_1_moves_one_good_to_the_poorest_bundle() {
    let inst = three_agents(&[1, 9, 5, 20], &[14, 18, 22, 19], &[10, 8, 29, 23]);
    let va = inst.valuation_of(0).clone();
    let config = SolverConfig::default();
    let solver = Solver::new(&inst, &config).unwrap();
    let state = solver.initial_state().unwrap();
    assert!(solver.try_terminate(&state).unwrap().is_none());

    let (step, event) = solver.step(&state, 1).unwrap();
    assert_eq!(event.case_label, CaseLabel::C1_1);
    let Step::Next(next) = step else {
        panic!("C1.1 continues");
    };
    let anchor = state.bundles[2];
    let anchor_v = match event.anchor_after {
        efx_core::Anchor::B => inst.valuation_of(1),
        efx_core::Anchor::C => inst.valuation_of(2),
    };
    let g = best_removal_good(anchor_v, anchor).unwrap();
    let grown = state.bundles[0].with(g);
    assert!(next.bundles.contains(&grown));
    assert_eq!(next.bundles[2], anchor.without(g));
    assert_eq!(next.phi, va.value(grown));
    assert!(next.phi > state.phi);
    assert!(solver.check_almost_feasible(&next));

    let solution = solve(&inst, &config).unwrap();
    assert!(oracle_accepts(&inst, &solution.allocation));
}

#[test]
fn c2_1_finishes_with_an_oracle_approved_allocation() {
    let inst = three_agents(&[21, 1, 5, 3], &[2, 14, 8, 11], &[14, 26, 24, 18]);
    let config = SolverConfig::default();
    let solver = Solver::new(&inst, &config).unwrap();
    let state = solver.initial_state().unwrap();
    assert!(solver.try_terminate(&state).unwrap().is_none());
    let (step, event) = solver.step(&state, 1).unwrap();
    assert_eq!(event.case_label, CaseLabel::C2_1);
    let Step::Done(x) = step else {
        panic!("C2.1 finishes");
    };
    assert!(oracle_accepts(&inst, &x));
    assert!(
        exists_efx_bruteforce(&inst, DEFAULT_ORACLE_CAP)
            .unwrap()
            .exists
    );
}

#[test]
fn fixtures_reach_their_cases() {
    for (file, label) in [
        ("c1_2_pr.json", CaseLabel::C1_2Pr),
        ("c2_2_pr.json", CaseLabel::C2_2Pr),
        ("c2_3.json", CaseLabel::C2_3),
        ("c2_3_pr.json", CaseLabel::C2_3Pr),
        ("c2_3_mirror.json", CaseLabel::C2_3Mirror),
    ] {
        let inst = fixture(file);
        let report = cross_validate(&inst, &perturbing(), DEFAULT_ORACLE_CAP, &solve).unwrap();
        let labels: Vec<CaseLabel> = report.solution.trace.iter().map(|e| e.case_label).collect();
        assert!(labels.contains(&label), "{file}: {labels:?}");
    }
}

#[test]
fn traces_are_well_formed() {
    for seed in 0..150 {
        let n = 4 + (seed % 3) as usize;
        let m = (5 + (seed % 5) as usize).max(n);
        let inst = generate(&GenParams::additive(n, m, 3, 100, seed)).unwrap();
        let s = solve(&inst, &perturbing()).unwrap();
        let trace = &s.trace;
        assert_eq!(trace[0].case_label, CaseLabel::Init);
        assert!(trace.last().unwrap().case_label.is_terminal());
        assert!(trace.len() as u128 <= 1u128 << m);
        for (i, e) in trace.iter().enumerate() {
            assert_eq!(e.step, i);
            if i > 0 {
                assert_eq!(e.phi_before, trace[i - 1].phi_after);
            }
            if !matches!(
                e.case_label,
                CaseLabel::Init | CaseLabel::DoneAlt | CaseLabel::C2_1
            ) {
                assert!(e.phi_after > e.phi_before, "seed {seed}: {e:?}");
            }
        }
        assert!(is_efx(&inst, &s.allocation).unwrap());
    }
}

#[test]
fn table_valued_c_agent() {
    let params = GenParams {
        table_c: true,
        ..GenParams::additive(5, 7, 3, 50, 11)
    };
    let inst = generate(&params).unwrap();
    let report = cross_validate(&inst, &perturbing(), DEFAULT_ORACLE_CAP, &solve).unwrap();
    assert!(report.oracle.exists);
}

#[test]
fn small_and_special_shapes() {
    let v = |w: &[Value]| Valuation::additive(w.to_vec()).unwrap();
    let shapes = [
        three_agents(&[3, 1], &[1, 3], &[2, 2]),
        Instance::from_valuations(vec![v(&[5, 1, 2])]).unwrap(),
        Instance::from_valuations(vec![v(&[5, 1, 2, 7]), v(&[1, 6, 2, 2])]).unwrap(),
    ];
    for inst in &shapes {
        let s = solve(inst, &perturbing()).unwrap();
        assert!(oracle_accepts(inst, &s.allocation));
    }
    let empty = three_agents(&[], &[], &[]);
    let s = solve(&empty, &SolverConfig::default()).unwrap();
    assert!(s.allocation.bundles.iter().all(|b| b.is_empty()));
}

#[test]
fn precondition_failures() {
    let v = |w: &[Value]| Valuation::additive(w.to_vec()).unwrap();
    let distinct = Instance::from_valuations(vec![
        v(&[1, 2, 4, 8]),
        v(&[8, 4, 2, 1]),
        v(&[1, 4, 2, 8]),
        v(&[2, 1, 8, 4]),
    ])
    .unwrap();
    assert!(matches!(
        solve(&distinct, &perturbing()),
        Err(EfxError::Structure(_))
    ));

    let degenerate = three_agents(&[1, 2, 3], &[1, 2, 4], &[4, 2, 1]);
    assert!(matches!(
        solve(&degenerate, &SolverConfig::default()),
        Err(EfxError::Structure(_))
    ));
    assert!(solve(&degenerate, &perturbing()).is_ok());
}

#[test]
fn hunt_reports_seeds_of_a_broken_solver() {
    let config = HuntConfig {
        n: 4,
        m: 5,
        max_value: 20,
        count: 6,
        seed: 40,
        solver: perturbing(),
        oracle_cap: DEFAULT_ORACLE_CAP,
    };
    // gives every good to the first agent
    let broken = |inst: &Instance, _: &SolverConfig| -> efx_core::Result<Solution> {
        let n = inst.agent_count();
        let mut bundles = vec![Bundle::EMPTY; n];
        bundles[0] = inst.all_goods();
        Ok(Solution {
            allocation: Allocation::identity(bundles),
            trace: Vec::new(),
            perturbed: false,
        })
    };
    let report = hunt(&config, &broken);
    let seeds: Vec<u64> = report.failures.iter().map(|f| f.seed).collect();
    assert_eq!(seeds, (40..46).collect::<Vec<_>>());

    let healthy = hunt(&config, &solve);
    assert!(healthy.failures.is_empty());
    assert_eq!(healthy.label_counts[&CaseLabel::Init], 6);
}
