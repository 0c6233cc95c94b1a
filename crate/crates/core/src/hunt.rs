//! Falsification harness: many seeded instances from the solver's structural
//! class, each solved and cross-checked against the exhaustive oracle.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::gen::{generate, GenParams};
use crate::model::Value;
use crate::oracle::{cross_validate, SolveFn};
use crate::solver::{CaseLabel, SolverConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuntConfig {
    pub n: usize,
    pub m: usize,
    pub max_value: Value,
    pub count: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub oracle_cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuntFailure {
    /// Seed that regenerates the instance with `n`, `m`, 3 classes and `max_value`.
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HuntReport {
    pub instances: usize,
    pub failures: Vec<HuntFailure>,
    pub label_counts: BTreeMap<CaseLabel, usize>,
}

/// Seed of the `i`-th hunt instance.
pub fn instance_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Runs the hunt. Instances run in parallel; failures are reported in seed order.
pub fn hunt(config: &HuntConfig, solve_fn: &SolveFn) -> HuntReport {
    let outcomes: Vec<Result<Vec<CaseLabel>, HuntFailure>> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(config.seed, i);
            let fail = |message: String| HuntFailure { seed, message };
            let params = GenParams::additive(config.n, config.m, 3, config.max_value, seed);
            let inst = generate(&params).map_err(|e| fail(e.to_string()))?;
            let report = cross_validate(&inst, &config.solver, config.oracle_cap, solve_fn)
                .map_err(|e| fail(e.to_string()))?;
            Ok(report.solution.trace.iter().map(|e| e.case_label).collect())
        })
        .collect();

    let mut report = HuntReport {
        instances: config.count,
        ..HuntReport::default()
    };
    for outcome in outcomes {
        match outcome {
            Ok(labels) => {
                for l in labels {
                    *report.label_counts.entry(l).or_default() += 1;
                }
            }
            Err(f) => report.failures.push(f),
        }
    }
    report
}
