//! Exhaustive ground truth: EFX search over every allocation, MMS-feasibility,
//! and cross-validation of solver output.
//!
//! None of the EFX checks here go through the `envy` module; the oracle keeps
//! its own value and max-remainder tables so that it stays an independent
//! judge of solver output.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{EfxError, Result};
use crate::model::{Allocation, Bundle, Instance, Valuation, Value};
use crate::solver::{CaseLabel, Solution, SolverConfig};

/// Default bound on `n^m` for allocation enumeration.
pub const DEFAULT_ORACLE_CAP: u64 = 100_000_000;
/// The oracle tabulates every valuation, so `m` is bounded as well.
pub const ORACLE_MAX_GOODS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub exists: bool,
    /// First EFX allocation in enumeration order.
    pub witness: Option<Allocation>,
    pub efx_count: u64,
    pub allocations_scanned: u64,
}

pub fn allocation_count(m: usize, n: usize) -> u128 {
    (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX)
}

fn check_cap(m: usize, n: usize, cap: u64) -> Result<u64> {
    let size = allocation_count(m, n);
    if n == 0 || size > cap as u128 {
        return Err(EfxError::CapExceeded {
            what: "allocation enumeration",
            size,
            cap: cap as u128,
        });
    }
    Ok(size as u64)
}

/// Bundles for the allocation whose label vector is the base-`n` expansion of
/// `index` (digit `g` = owner of good `g`).
fn decode(mut index: u64, m: usize, n: usize) -> Vec<Bundle> {
    let mut bundles = vec![Bundle::EMPTY; n];
    for g in 0..m {
        let owner = (index % n as u64) as usize;
        index /= n as u64;
        bundles[owner] = bundles[owner].with(g);
    }
    bundles
}

/// Every assignment of `m` goods to `n` ordered bundles, in base-`n` counting
/// order with good 0 as the least significant digit.
pub fn enumerate_allocations(
    m: usize,
    n: usize,
    cap: u64,
) -> Result<impl Iterator<Item = Allocation>> {
    let total = check_cap(m, n, cap)?;
    Ok((0..total).map(move |i| Allocation::identity(decode(i, m, n))))
}

/// Value and max-remainder tables for every distinct valuation of an instance.
pub struct OracleTables {
    values: Vec<Vec<Value>>,
    /// `max_rest[S] = max_{g∈S} v(S ∖ g)`; unused for the empty bundle.
    max_rest: Vec<Vec<Value>>,
    /// Table index used by each agent.
    of_agent: Vec<usize>,
}

impl OracleTables {
    pub fn new(inst: &Instance) -> Result<Self> {
        let m = inst.goods();
        if m > ORACLE_MAX_GOODS {
            return Err(EfxError::CapExceeded {
                what: "oracle goods",
                size: m as u128,
                cap: ORACLE_MAX_GOODS as u128,
            });
        }
        let ids: Vec<&String> = inst.valuations().keys().collect();
        let mut values = Vec::new();
        let mut max_rest = Vec::new();
        for id in &ids {
            let v = &inst.valuations()[*id];
            let table: Vec<Value> = (0..1u64 << m)
                .map(|s| v.value(Bundle::from_bits(s)))
                .collect();
            let rest = (0..1u64 << m)
                .map(|s| {
                    let mut best = 0;
                    let mut bits = s;
                    while bits != 0 {
                        let low = bits & bits.wrapping_neg();
                        best = best.max(table[(s ^ low) as usize]);
                        bits ^= low;
                    }
                    best
                })
                .collect();
            values.push(table);
            max_rest.push(rest);
        }
        let of_agent = inst
            .agents()
            .iter()
            .map(|a| {
                ids.iter()
                    .position(|id| **id == a.valuation)
                    .expect("validated id")
            })
            .collect();
        Ok(OracleTables {
            values,
            max_rest,
            of_agent,
        })
    }

    /// EFX check where `per_agent[i]` is agent `i`'s bundle.
    pub fn accepts(&self, per_agent: &[Bundle]) -> bool {
        per_agent.iter().enumerate().all(|(i, own)| {
            let t = self.of_agent[i];
            let mine = self.values[t][own.bits() as usize];
            per_agent.iter().enumerate().all(|(j, other)| {
                j == i || other.is_empty() || self.max_rest[t][other.bits() as usize] <= mine
            })
        })
    }
}

/// Scans all `n^m` allocations (agent `i` holds bundle `i`) for EFX ones.
///
/// Enumerating ordered bundle tuples with the identity assignment already
/// covers every assignment of bundles to agents, so no agent permutations are
/// needed on top.
pub fn exists_efx_bruteforce(inst: &Instance, cap: u64) -> Result<OracleResult> {
    let (m, n) = (inst.goods(), inst.agent_count());
    let total = check_cap(m, n, cap)?;
    let tables = OracleTables::new(inst)?;

    // chunks over the most significant digits keep the global order
    let low_digits = m.saturating_sub(3);
    let chunk = (n as u64).pow(low_digits as u32);
    let chunks = total / chunk;
    let partials: Vec<(u64, Option<u64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| scan_chunk(&tables, m, n, c * chunk, chunk, low_digits))
        .collect();
    let efx_count = partials.iter().map(|p| p.0).sum();
    let witness = partials
        .iter()
        .find_map(|p| p.1)
        .map(|i| Allocation::identity(decode(i, m, n)));
    Ok(OracleResult {
        exists: witness.is_some(),
        witness,
        efx_count,
        allocations_scanned: total,
    })
}

/// Scans indices `start..start + len`, where `len = n^low_digits` and the
/// high digits are fixed by `start`. Returns the EFX count and first hit.
fn scan_chunk(
    tables: &OracleTables,
    m: usize,
    n: usize,
    start: u64,
    len: u64,
    low_digits: usize,
) -> (u64, Option<u64>) {
    let mut bundles = decode(start, m, n);
    let mut labels = vec![0usize; low_digits];
    let mut count = 0;
    let mut first = None;
    for offset in 0..len {
        if tables.accepts(&bundles) {
            count += 1;
            first.get_or_insert(start + offset);
        }
        // odometer increment over the low digits
        for g in 0..low_digits {
            bundles[labels[g]] = bundles[labels[g]].without(g);
            labels[g] += 1;
            if labels[g] < n {
                bundles[labels[g]] = bundles[labels[g]].with(g);
                break;
            }
            labels[g] = 0;
            bundles[0] = bundles[0].with(g);
        }
    }
    (count, first)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MmsReport {
    /// For every `S` and every two 2-partitions of `S`, the larger part of
    /// one is worth at least the smaller part of the other.
    pub feasible: bool,
    /// Strict version of the same inequality, over nonempty `S`.
    pub strict: bool,
}

/// MMS-feasibility by enumerating every bundle and every 2-partition of it
/// (`3^m` pairs). Does not require monotonicity.
pub fn is_mms_feasible(v: &Valuation, cap_goods: usize) -> Result<MmsReport> {
    if v.goods() > cap_goods {
        return Err(EfxError::CapExceeded {
            what: "MMS-feasibility goods",
            size: v.goods() as u128,
            cap: cap_goods as u128,
        });
    }
    let values = v.all_values(cap_goods)?;
    let mut feasible = true;
    let mut strict = true;
    for s in Bundle::full(v.goods()).subsets() {
        let mut min_of_max = Value::MAX;
        let mut max_of_min = 0;
        for a in s.subsets() {
            let x = values[a.bits() as usize];
            let y = values[s.difference(a).bits() as usize];
            min_of_max = min_of_max.min(x.max(y));
            max_of_min = max_of_min.max(x.min(y));
        }
        feasible &= min_of_max >= max_of_min;
        strict &= s.is_empty() || min_of_max > max_of_min;
    }
    Ok(MmsReport { feasible, strict })
}

#[derive(Clone, Debug)]
pub struct CrossReport {
    pub solution: Solution,
    pub oracle: OracleResult,
}

/// Signature of a solver under test.
pub type SolveFn = dyn Fn(&Instance, &SolverConfig) -> Result<Solution> + Sync;

/// Runs `solve_fn`, then checks its output against the oracle: the oracle must
/// find an EFX allocation, and must itself accept the solver's allocation.
pub fn cross_validate(
    inst: &Instance,
    config: &SolverConfig,
    oracle_cap: u64,
    solve_fn: &SolveFn,
) -> Result<CrossReport> {
    let solution = solve_fn(inst, config)?;
    let x = &solution.allocation;
    if let Some(problem) = crate::model::allocation_problem(inst, x) {
        return Err(EfxError::Invariant(format!(
            "solver output is not an allocation: {problem}"
        )));
    }
    let oracle = exists_efx_bruteforce(inst, oracle_cap)?;
    if !oracle.exists {
        return Err(EfxError::Invariant(format!(
            "oracle found no EFX allocation among {} candidates",
            oracle.allocations_scanned
        )));
    }
    let tables = OracleTables::new(inst)?;
    let per_agent = x.per_agent();
    if !tables.accepts(&per_agent) {
        return Err(EfxError::Invariant(format!(
            "solver allocation {per_agent:?} is not in the oracle's EFX set"
        )));
    }
    Ok(CrossReport { solution, oracle })
}

/// Occurrences of each case label across traces.
pub fn label_counts<'a>(
    traces: impl IntoIterator<Item = &'a Solution>,
) -> BTreeMap<CaseLabel, usize> {
    let mut counts = BTreeMap::new();
    for s in traces {
        for e in &s.trace {
            *counts.entry(e.case_label).or_default() += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_allocations(3, 2, 1000).unwrap().count(), 8);
        let only: Vec<_> = enumerate_allocations(0, 3, 1000).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert!(only[0].bundles.iter().all(|b| b.is_empty()));
        let all: HashSet<_> = enumerate_allocations(2, 3, 1000).unwrap().collect();
        assert_eq!(all.len(), 9);
        assert!(enumerate_allocations(10, 10, 1000).is_err());
    }

    #[test]
    fn two_identical_agents() {
        let v = Valuation::additive(vec![1, 2]).unwrap();
        let inst = Instance::from_valuations(vec![v.clone(), v]).unwrap();
        let r = exists_efx_bruteforce(&inst, 1000).unwrap();
        assert!(r.exists);
        assert_eq!(r.allocations_scanned, 4);
        // ({0},{1}) and ({1},{0})
        assert_eq!(r.efx_count, 2);
        assert_eq!(
            r.witness.unwrap().bundles,
            vec![Bundle::singleton(1), Bundle::singleton(0)]
        );
    }

    #[test]
    fn chunked_scan_matches_plain_scan() {
        let inst = Instance::from_valuations(vec![
            Valuation::additive(vec![3, 1, 4, 1, 5, 9]).unwrap(),
            Valuation::additive(vec![2, 7, 1, 8, 2, 8]).unwrap(),
            Valuation::additive(vec![1, 6, 1, 8, 3, 3]).unwrap(),
        ])
        .unwrap();
        let tables = OracleTables::new(&inst).unwrap();
        let plain: Vec<u64> = (0..3u64.pow(6))
            .filter(|&i| tables.accepts(&decode(i, 6, 3)))
            .collect();
        let r = exists_efx_bruteforce(&inst, 1_000_000).unwrap();
        assert_eq!(r.efx_count, plain.len() as u64);
        assert_eq!(r.witness.unwrap().bundles, decode(plain[0], 6, 3));
    }

    #[test]
    fn mms_examples() {
        let bad = Valuation::table(3, vec![0, 5, 1, 4, 3, 7, 6, 8]).unwrap();
        assert!(!is_mms_feasible(&bad, 16).unwrap().feasible);
        let one = Valuation::table(1, vec![0, 1]).unwrap();
        let r = is_mms_feasible(&one, 16).unwrap();
        assert!(r.feasible && r.strict);
        let add = Valuation::additive(vec![4, 1, 3, 2]).unwrap();
        let r = is_mms_feasible(&add, 16).unwrap();
        assert!(r.feasible);
        // {1,2,3,4}-style ties: 4+1 = 3+2
        assert!(!r.strict);
        assert!(is_mms_feasible(&Valuation::additive(vec![1; 17]).unwrap(), 16).is_err());
    }
}
