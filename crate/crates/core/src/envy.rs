//! Envy predicates over bundles.
//!
//! `strongly_envies` and `is_efx` follow the non-strict reading (an agent is
//! fine as long as its own value is at least the value of any rival bundle
//! minus one good). `is_efx_feasible` uses the strict reading. On
//! non-degenerate valuations the two agree except for empty-bundle edge cases.

use crate::error::{EfxError, Result};
use crate::model::{allocation_problem, Allocation, Bundle, Good, Instance, Valuation, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvyReport {
    pub envies: bool,
    pub strongly_envies: bool,
    /// Smallest-index good whose removal from the rival bundle still leaves envy.
    pub witness_good: Option<Good>,
}

/// Largest value of `T ∖ g` over `g ∈ T`, or `None` for the empty bundle.
pub fn max_remainder(v: &Valuation, t: Bundle) -> Option<Value> {
    t.iter().map(|g| v.value(t.without(g))).max()
}

/// Does an agent holding `own` strongly envy `other`?
pub fn strongly_envies(v: &Valuation, own: Bundle, other: Bundle) -> EnvyReport {
    let mine = v.value(own);
    let witness_good = other.iter().find(|&g| mine < v.value(other.without(g)));
    EnvyReport {
        envies: mine < v.value(other),
        strongly_envies: witness_good.is_some(),
        witness_good,
    }
}

/// `v(T ∖ h) < v(S)` for every `h ∈ T`. Vacuously true for empty `T`.
pub fn is_efx_feasible(v: &Valuation, own: Bundle, other: Bundle) -> bool {
    let mine = v.value(own);
    other.iter().all(|h| v.value(other.without(h)) < mine)
}

/// Is `bundles[i]` EFX-feasible w.r.t. every other bundle under `v`?
pub fn is_feasible_bundle(v: &Valuation, bundles: &[Bundle], i: usize) -> bool {
    bundles
        .iter()
        .enumerate()
        .all(|(j, &t)| j == i || is_efx_feasible(v, bundles[i], t))
}

/// Indices of the bundles that are EFX-feasible for an agent with valuation `v`.
pub fn feasible_set(bundles: &[Bundle], v: &Valuation) -> Vec<usize> {
    (0..bundles.len())
        .filter(|&i| is_feasible_bundle(v, bundles, i))
        .collect()
}

/// A strong-envy witness in an allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvyWitness {
    pub agent: usize,
    pub envied_agent: usize,
    /// Removing this good from the envied bundle still leaves envy.
    pub good: Good,
}

/// First strong-envy pair in agent order, if any.
pub fn first_strong_envy(inst: &Instance, x: &Allocation) -> Result<Option<EnvyWitness>> {
    if let Some(problem) = allocation_problem(inst, x) {
        return Err(EfxError::Invalid(format!(
            "not a complete allocation: {problem}"
        )));
    }
    let n = inst.agent_count();
    for agent in 0..n {
        let v = inst.valuation_of(agent);
        let own = x.bundle_of(agent);
        for other in (0..n).filter(|&j| j != agent) {
            if let Some(good) = strongly_envies(v, own, x.bundle_of(other)).witness_good {
                return Ok(Some(EnvyWitness {
                    agent,
                    envied_agent: other,
                    good,
                }));
            }
        }
    }
    Ok(None)
}

/// No agent strongly envies another.
pub fn is_efx(inst: &Instance, x: &Allocation) -> Result<bool> {
    Ok(first_strong_envy(inst, x)?.is_none())
}

/// A subset `S ⊆ T` with `v(own) < v(S)` and `v(own) >= v(S ∖ h)` for all
/// `h ∈ S`.
///
/// Goods are dropped greedily: candidates are visited by decreasing `v(T ∖ g)`
/// (for additive valuations, increasing `v(g)`), ties by index, and a good is
/// dropped whenever envy survives without it. Passes repeat until nothing can
/// be dropped, so the result is minimal even for non-monotone tables.
pub fn minimally_envied_subset(v: &Valuation, own: Bundle, t: Bundle) -> Result<Bundle> {
    let mine = v.value(own);
    if mine >= v.value(t) {
        return Err(EfxError::Precondition(format!(
            "{own:?} does not envy {t:?}; no minimally envied subset"
        )));
    }
    let mut order: Vec<(Value, Good)> = t.iter().map(|g| (v.value(t.without(g)), g)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut s = t;
    loop {
        let mut dropped = false;
        for &(_, g) in &order {
            if s.contains(g) && mine < v.value(s.without(g)) {
                s = s.without(g);
                dropped = true;
            }
        }
        if !dropped {
            return Ok(s);
        }
    }
}

/// `argmax_{g ∈ T} v(T ∖ g)`, ties by smallest index. For additive valuations
/// this is the least valuable good of `T`.
pub fn best_removal_good(v: &Valuation, t: Bundle) -> Result<Good> {
    let mut best: Option<(Value, Good)> = None;
    for g in t.iter() {
        let rest = v.value(t.without(g));
        if best.is_none_or(|(b, _)| rest > b) {
            best = Some((rest, g));
        }
    }
    best.map(|(_, g)| g)
        .ok_or_else(|| EfxError::Precondition("best removal good of an empty bundle".into()))
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
    fn strong_envy_examples() {
        let v = add(&[5, 3, 4]);
        let r = strongly_envies(&v, b(&[0]), b(&[1, 2]));
        assert!(r.envies && !r.strongly_envies && r.witness_good.is_none());

        let r = strongly_envies(&v, Bundle::EMPTY, b(&[1, 2]));
        assert!(r.strongly_envies);
        assert_eq!(r.witness_good, Some(1));

        let r = strongly_envies(&v, Bundle::EMPTY, b(&[2]));
        assert!(r.envies && !r.strongly_envies);
    }

    #[test]
    fn efx_feasibility_examples() {
        let v = add(&[5, 3, 4]);
        assert!(is_efx_feasible(&v, b(&[0]), b(&[1, 2])));
        assert!(!is_efx_feasible(&v, Bundle::EMPTY, b(&[1])));
        assert!(is_efx_feasible(&v, Bundle::EMPTY, Bundle::EMPTY));
    }

    #[test]
    fn feasible_set_examples() {
        let v = add(&[1, 2, 4]);
        assert_eq!(
            feasible_set(&[b(&[0]), b(&[1]), b(&[2])], &v),
            vec![0, 1, 2]
        );
        assert_eq!(feasible_set(&[b(&[0, 1]), b(&[2])], &v), vec![0, 1]);
        assert_eq!(feasible_set(&[b(&[0, 1, 2])], &v), vec![0]);
    }

    #[test]
    fn efx_examples() {
        let inst = Instance::from_valuations(vec![add(&[3]), add(&[3])]).unwrap();
        assert!(is_efx(&inst, &Allocation::identity(vec![Bundle::EMPTY, b(&[0])])).unwrap());

        let inst = Instance::from_valuations(vec![add(&[10, 1]), add(&[10, 1])]).unwrap();
        let x = Allocation::identity(vec![b(&[0, 1]), Bundle::EMPTY]);
        assert!(!is_efx(&inst, &x).unwrap());
        assert_eq!(
            first_strong_envy(&inst, &x).unwrap(),
            Some(EnvyWitness {
                agent: 1,
                envied_agent: 0,
                good: 0
            })
        );
        assert!(is_efx(&inst, &Allocation::identity(vec![b(&[0])])).is_err());
    }

    #[test]
    fn minimally_envied_subset_examples() {
        // goods 0,1,2 worth 4,3,2; own bundle (good 3) worth 5
        let v = add(&[4, 3, 2, 5]);
        assert_eq!(
            minimally_envied_subset(&v, b(&[3]), b(&[0, 1, 2])).unwrap(),
            b(&[0, 1])
        );

        let v = add(&[7, 5]);
        assert_eq!(
            minimally_envied_subset(&v, Bundle::EMPTY, b(&[0])).unwrap(),
            b(&[0])
        );
        assert_eq!(
            minimally_envied_subset(&v, b(&[1]), b(&[0])).unwrap(),
            b(&[0])
        );
        assert!(minimally_envied_subset(&v, b(&[0]), b(&[1])).is_err());
    }

    #[test]
    fn best_removal_examples() {
        assert_eq!(
            best_removal_good(&add(&[2, 3, 5]), b(&[0, 1, 2])).unwrap(),
            0
        );
        assert_eq!(best_removal_good(&add(&[2, 3, 5]), b(&[2])).unwrap(), 2);
        let t = Valuation::table(2, vec![0, 6, 5, 10]).unwrap();
        assert_eq!(best_removal_good(&t, b(&[0, 1])).unwrap(), 1);
        assert!(best_removal_good(&t, Bundle::EMPTY).is_err());
    }
}
