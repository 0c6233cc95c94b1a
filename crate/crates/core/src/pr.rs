//! Single-valuation EFX partitioning.
//!
//! Given a `k`-partition of some ground set and one monotone valuation, both
//! routines return a `k`-partition of the same ground set that is EFX under
//! that valuation and whose least valued part is worth at least as much as the
//! least valued part of the input.
//!
//! [`pr_bruteforce`] finds the leximin++-maximal partition by exhaustive search.
//! [`pr_localsearch`] repeatedly lets a least valued part trade itself for a
//! minimally envied subset of a bundle it strongly envies, and falls back to the
//! exhaustive search if its iteration budget runs out.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::envy::{max_remainder, minimally_envied_subset};
use crate::error::{EfxError, Result};
use crate::model::{Bundle, Good, Valuation, Value};

/// Default bound on `k^|ground|` for the exhaustive search.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;
/// Default number of local-search swaps before falling back.
pub const DEFAULT_ITERATION_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrStrategy {
    Brute,
    #[default]
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrLimits {
    pub enumeration_cap: u64,
    pub iteration_limit: usize,
}

impl Default for PrLimits {
    fn default() -> Self {
        PrLimits {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            iteration_limit: DEFAULT_ITERATION_LIMIT,
        }
    }
}

/// An ordered list of pairwise disjoint parts whose union is the ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: Bundle,
    parts: Vec<Bundle>,
}

impl Partition {
    pub fn new(ground: Bundle, parts: Vec<Bundle>) -> Result<Self> {
        let p = Partition::from_parts(parts)?;
        if p.ground != ground {
            return Err(EfxError::Invalid(format!(
                "parts cover {:?}, expected ground set {ground:?}",
                p.ground
            )));
        }
        Ok(p)
    }

    /// Partition of the union of `parts`. Fails if parts overlap or there are none.
    pub fn from_parts(parts: Vec<Bundle>) -> Result<Self> {
        if parts.is_empty() {
            return Err(EfxError::Invalid(
                "a partition needs at least one part".into(),
            ));
        }
        let mut ground = Bundle::EMPTY;
        for p in &parts {
            if !ground.is_disjoint(*p) {
                return Err(EfxError::Invalid(format!(
                    "part {p:?} overlaps another part"
                )));
            }
            ground = ground.union(*p);
        }
        Ok(Partition { ground, parts })
    }

    pub fn ground(&self) -> Bundle {
        self.ground
    }

    pub fn parts(&self) -> &[Bundle] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Bundle> {
        self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn min_value(&self, v: &Valuation) -> Value {
        self.parts.iter().map(|&p| v.value(p)).min().unwrap_or(0)
    }

    /// No part strongly envies another under `v`.
    pub fn is_efx(&self, v: &Valuation) -> bool {
        is_efx_parts(&self.parts, v)
    }
}

fn is_efx_parts(parts: &[Bundle], v: &Valuation) -> bool {
    let values: Vec<Value> = parts.iter().map(|&p| v.value(p)).collect();
    parts
        .iter()
        .enumerate()
        .all(|(j, &t)| match max_remainder(v, t) {
            None => true,
            Some(rest) => values
                .iter()
                .enumerate()
                .all(|(i, &own)| i == j || own >= rest),
        })
}

/// `(value, size)` of every part, ascending.
fn leximin_key(parts: &[Bundle], v: &Valuation, out: &mut Vec<(Value, u32)>) {
    out.clear();
    out.extend(parts.iter().map(|&p| (v.value(p), p.len() as u32)));
    out.sort_unstable();
}

/// Compares two partitions of the same ground set by leximin++. `Less` means
/// `b` is better.
pub fn leximin_pp_order(a: &Partition, b: &Partition, v: &Valuation) -> Result<Ordering> {
    if a.ground != b.ground || a.k() != b.k() {
        return Err(EfxError::Precondition(
            "leximin++ comparison needs partitions of one ground set into the same number of parts"
                .into(),
        ));
    }
    let (mut ka, mut kb) = (Vec::new(), Vec::new());
    leximin_key(&a.parts, v, &mut ka);
    leximin_key(&b.parts, v, &mut kb);
    Ok(ka.cmp(&kb))
}

/// Number of label vectors the exhaustive search is charged for.
pub fn assignment_count(k: usize, goods: usize) -> u128 {
    (k as u128).checked_pow(goods as u32).unwrap_or(u128::MAX)
}

/// Leximin++-maximal `k`-partition of `input.ground()` under `v`.
///
/// Label vectors (one part label per good, read as a base-`k` number whose
/// digit `i` is the label of the `i`-th smallest good) are considered in
/// increasing order and the first optimum wins. Because the
/// order is invariant under renaming parts, only restricted-growth label
/// vectors need to be visited; the answer is the same as scanning all
/// `k^|ground|` of them.
pub fn pr_bruteforce(input: &Partition, v: &Valuation, limits: &PrLimits) -> Result<Partition> {
    // most significant digit first
    let mut goods: Vec<Good> = input.ground.iter().collect();
    goods.reverse();
    let k = input.k();
    let size = assignment_count(k, goods.len());
    if size > limits.enumeration_cap as u128 {
        return Err(EfxError::CapExceeded {
            what: "partition enumeration",
            size,
            cap: limits.enumeration_cap as u128,
        });
    }
    if !v.is_monotone_on(input.ground) {
        return Err(EfxError::Precondition(
            "exhaustive partitioning needs a monotone valuation".into(),
        ));
    }
    let mut search = Search {
        v,
        goods: &goods,
        parts: vec![Bundle::EMPTY; k],
        key: Vec::with_capacity(k),
        best_key: Vec::new(),
        best: None,
    };
    search.descend(0, 0);
    let parts = search.best.expect("at least one partition is visited");
    Ok(Partition {
        ground: input.ground,
        parts,
    })
}

struct Search<'a> {
    v: &'a Valuation,
    goods: &'a [Good],
    parts: Vec<Bundle>,
    key: Vec<(Value, u32)>,
    best_key: Vec<(Value, u32)>,
    best: Option<Vec<Bundle>>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, used: usize) {
        if depth == self.goods.len() {
            leximin_key(&self.parts, self.v, &mut self.key);
            if self.best.is_none() || self.key > self.best_key {
                std::mem::swap(&mut self.key, &mut self.best_key);
                self.best = Some(self.parts.clone());
            }
            return;
        }
        let g = self.goods[depth];
        let top = (used + 1).min(self.parts.len());
        for label in 0..top {
            self.parts[label] = self.parts[label].with(g);
            self.descend(depth + 1, used.max(label + 1));
            self.parts[label] = self.parts[label].without(g);
        }
    }
}

/// Local-search EFX partitioning, starting from `input`.
pub fn pr_localsearch(input: &Partition, v: &Valuation, limits: &PrLimits) -> Result<Partition> {
    let mut parts = input.parts.clone();
    for _ in 0..limits.iteration_limit {
        let values: Vec<Value> = parts.iter().map(|&p| v.value(p)).collect();
        let low = (0..parts.len())
            .min_by_key(|&i| values[i])
            .expect("partition has parts");
        let envied = (0..parts.len())
            .find(|&j| j != low && max_remainder(v, parts[j]).is_some_and(|r| values[low] < r));
        let Some(j) = envied else {
            return Ok(Partition {
                ground: input.ground,
                parts,
            });
        };
        let s = minimally_envied_subset(v, parts[low], parts[j])?;
        let rest = parts[j].difference(s).union(parts[low]);
        parts[low] = s;
        parts[j] = rest;
    }
    pr_bruteforce(input, v, limits)
}

/// Runs the selected routine.
pub fn pr(
    input: &Partition,
    v: &Valuation,
    strategy: PrStrategy,
    limits: &PrLimits,
) -> Result<Partition> {
    match strategy {
        PrStrategy::Brute => pr_bruteforce(input, v, limits),
        PrStrategy::Local => pr_localsearch(input, v, limits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(goods: &[Good]) -> Bundle {
        goods.iter().copied().collect()
    }

    fn add(w: &[Value]) -> Valuation {
        Valuation::additive(w.to_vec()).unwrap()
    }

    #[test]
    fn order_prefers_larger_minimum() {
        // goods worth 8,1,2,4
        let v = add(&[8, 1, 2, 4]);
        let a = Partition::from_parts(vec![b(&[0]), b(&[1, 2, 3])]).unwrap();
        let c = Partition::from_parts(vec![b(&[0, 1]), b(&[2, 3])]).unwrap();
        assert_eq!(leximin_pp_order(&a, &c, &v).unwrap(), Ordering::Greater);
        assert_eq!(leximin_pp_order(&a, &a, &v).unwrap(), Ordering::Equal);
        let other = Partition::from_parts(vec![b(&[0]), b(&[1, 2])]).unwrap();
        assert!(leximin_pp_order(&a, &other, &v).is_err());
    }

    #[test]
    fn order_breaks_ties_on_second_position() {
        // values 1,2,3,4: both have minimum {0} = 1, then 5 vs 2+...
        let v = add(&[1, 2, 3, 4]);
        let a = Partition::from_parts(vec![b(&[0]), b(&[1, 2]), b(&[3])]).unwrap(); // 1,4,5
        let c = Partition::from_parts(vec![b(&[0]), b(&[1]), b(&[2, 3])]).unwrap(); // 1,2,7
        assert_eq!(leximin_pp_order(&a, &c, &v).unwrap(), Ordering::Greater);
    }

    #[test]
    fn order_uses_size_on_equal_values() {
        let v = add(&[2, 1, 1]);
        let a = Partition::from_parts(vec![b(&[0]), b(&[1, 2])]).unwrap();
        let c = Partition::from_parts(vec![b(&[1, 2]), b(&[0])]).unwrap();
        assert_eq!(leximin_pp_order(&a, &c, &v).unwrap(), Ordering::Equal);
        let v = add(&[3, 1, 2]);
        let big = Partition::from_parts(vec![b(&[0]), b(&[1, 2])]).unwrap(); // (3,1),(3,2)
        let small = Partition::from_parts(vec![b(&[0, 1]), b(&[2])]).unwrap(); // (2,1),(4,2)
        assert_eq!(
            leximin_pp_order(&big, &small, &v).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn brute_on_powers_of_two() {
        let v = add(&[1, 2, 4, 8]);
        let input = Partition::from_parts(vec![b(&[0, 1, 2, 3]), Bundle::EMPTY]).unwrap();
        let out = pr_bruteforce(&input, &v, &PrLimits::default()).unwrap();
        assert_eq!(out.parts(), &[b(&[3]), b(&[0, 1, 2])]);
        assert_eq!(out.min_value(&v), 7);
    }

    #[test]
    fn brute_single_part() {
        let v = add(&[1, 2, 4]);
        let input = Partition::from_parts(vec![b(&[0, 2]), b(&[1])]).unwrap();
        let one = Partition::new(b(&[0, 1, 2]), vec![b(&[0, 1, 2])]).unwrap();
        assert_eq!(pr_bruteforce(&one, &v, &PrLimits::default()).unwrap(), one);
        let out = pr_bruteforce(&input, &v, &PrLimits::default()).unwrap();
        assert!(out.is_efx(&v));
    }

    #[test]
    fn brute_singletons_when_k_equals_goods() {
        let v = add(&[3, 5, 9]);
        let input =
            Partition::from_parts(vec![b(&[0, 1, 2]), Bundle::EMPTY, Bundle::EMPTY]).unwrap();
        let out = pr_bruteforce(&input, &v, &PrLimits::default()).unwrap();
        assert!(out.parts().iter().all(|p| p.len() == 1));
        assert!(out.is_efx(&v));
    }

    #[test]
    fn brute_enforces_cap_and_monotonicity() {
        let v = add(&[1; 10]);
        let input = Partition::from_parts(vec![Bundle::full(10), Bundle::EMPTY]).unwrap();
        let tight = PrLimits {
            enumeration_cap: 1000,
            ..PrLimits::default()
        };
        assert!(matches!(
            pr_bruteforce(&input, &v, &tight),
            Err(EfxError::CapExceeded { .. })
        ));
        let t = Valuation::table(2, vec![0, 5, 1, 4]).unwrap();
        let input = Partition::from_parts(vec![b(&[0, 1]), Bundle::EMPTY]).unwrap();
        assert!(pr_bruteforce(&input, &t, &PrLimits::default()).is_err());
    }

    #[test]
    fn local_search_keeps_efx_input() {
        let v = add(&[1, 2, 4, 8]);
        let input = Partition::from_parts(vec![b(&[0, 1, 2]), b(&[3])]).unwrap();
        assert_eq!(
            pr_localsearch(&input, &v, &PrLimits::default()).unwrap(),
            input
        );
    }

    #[test]
    fn local_search_from_lopsided_start() {
        let v = add(&[1, 2, 4, 8]);
        let input = Partition::from_parts(vec![Bundle::EMPTY, Bundle::full(4)]).unwrap();
        let out = pr_localsearch(&input, &v, &PrLimits::default()).unwrap();
        let brute = pr_bruteforce(&input, &v, &PrLimits::default()).unwrap();
        assert!(out.is_efx(&v));
        assert_eq!(out.ground(), input.ground());
        assert!(out.min_value(&v) <= brute.min_value(&v));

        let input = Partition::from_parts(vec![b(&[0]), b(&[1, 2, 3])]).unwrap();
        let out = pr_localsearch(&input, &v, &PrLimits::default()).unwrap();
        assert!(out.is_efx(&v));
        assert!(out.min_value(&v) >= 1);
    }

    #[test]
    fn local_search_falls_back_when_out_of_budget() {
        let v = add(&[1, 2, 4, 8]);
        let input = Partition::from_parts(vec![Bundle::EMPTY, Bundle::full(4)]).unwrap();
        let none = PrLimits {
            iteration_limit: 0,
            ..PrLimits::default()
        };
        let out = pr_localsearch(&input, &v, &none).unwrap();
        assert_eq!(out, pr_bruteforce(&input, &v, &none).unwrap());
    }
}
