//! Instances, valuations, bundles and allocations.
//!
//! Everything here is exact integer arithmetic. Bundles are bitmasks over at
//! most [`MAX_GOODS`] goods; a valuation is either additive (one weight per
//! good) or an explicit table with one entry per subset, indexed by bitmask.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{EfxError, Result};

/// Exact value of a bundle.
pub type Value = u128;

/// Index of a good, in `0..m`.
pub type Good = usize;

/// Largest number of goods a bundle can address.
pub const MAX_GOODS: usize = 64;

/// Largest `m` for which table valuations are accepted (`2^m` entries).
pub const TABLE_MAX_GOODS: usize = 20;

/// A set of goods.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u64) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_GOODS, "at most {MAX_GOODS} goods are supported");
        if m == MAX_GOODS {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << m) - 1)
        }
    }

    pub fn singleton(g: Good) -> Self {
        Bundle(1u64 << g)
    }

    pub fn contains(self, g: Good) -> bool {
        g < MAX_GOODS && self.0 >> g & 1 == 1
    }

    #[must_use]
    pub fn with(self, g: Good) -> Self {
        Bundle(self.0 | 1u64 << g)
    }

    #[must_use]
    pub fn without(self, g: Good) -> Self {
        Bundle(self.0 & !(1u64 << g))
    }

    #[must_use]
    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    #[must_use]
    pub fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    #[must_use]
    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Goods in increasing index order.
    pub fn iter(self) -> Goods {
        Goods(self.0)
    }

    /// Every subset of this bundle, starting with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            of: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Good> for Bundle {
    fn from_iter<I: IntoIterator<Item = Good>>(iter: I) -> Self {
        iter.into_iter().fold(Bundle::EMPTY, Bundle::with)
    }
}

impl IntoIterator for Bundle {
    type Item = Good;
    type IntoIter = Goods;

    fn into_iter(self) -> Goods {
        self.iter()
    }
}

/// Iterator over the goods of a [`Bundle`].
#[derive(Clone)]
pub struct Goods(u64);

impl Iterator for Goods {
    type Item = Good;

    fn next(&mut self) -> Option<Good> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as Good;
        self.0 &= self.0 - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Goods {}

/// Iterator over all submasks of a bundle in increasing numeric order.
pub struct Subsets {
    of: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Bundle;

    fn next(&mut self) -> Option<Bundle> {
        let cur = self.next?;
        self.next = if cur == self.of {
            None
        } else {
            // next submask in increasing order
            Some((cur | !self.of).wrapping_add(1) & self.of)
        };
        Some(Bundle(cur))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationKind {
    Additive,
    Table,
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Additive(Vec<Value>),
    Table(Vec<Value>),
}

/// A set function over the goods `0..m` with `v(∅) = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct Valuation {
    m: usize,
    repr: Repr,
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Additive(w) => f.debug_tuple("Additive").field(w).finish(),
            Repr::Table(t) => f.debug_tuple("Table").field(&self.m).field(t).finish(),
        }
    }
}

impl Valuation {
    /// Additive valuation from per-good weights. Weights must be positive and
    /// their total must fit in a [`Value`].
    pub fn additive(weights: Vec<Value>) -> Result<Self> {
        let m = weights.len();
        if m > MAX_GOODS {
            return Err(EfxError::Invalid(format!(
                "{m} goods; at most {MAX_GOODS} are supported"
            )));
        }
        if let Some(g) = weights.iter().position(|&w| w == 0) {
            return Err(EfxError::Invalid(format!(
                "good {g} has zero value; additive weights must be positive"
            )));
        }
        weights
            .iter()
            .try_fold(0 as Value, |acc, &w| acc.checked_add(w))
            .ok_or(EfxError::Overflow("additive total"))?;
        Ok(Valuation {
            m,
            repr: Repr::Additive(weights),
        })
    }

    /// Table valuation over `m` goods; `entries[mask]` is the value of the bundle
    /// whose bit `k` is set iff good `k` is in it.
    pub fn table(m: usize, entries: Vec<Value>) -> Result<Self> {
        if m > TABLE_MAX_GOODS {
            return Err(EfxError::CapExceeded {
                what: "table valuation goods",
                size: m as u128,
                cap: TABLE_MAX_GOODS as u128,
            });
        }
        if entries.len() != 1usize << m {
            return Err(EfxError::Invalid(format!(
                "table over {m} goods needs {} entries, got {}",
                1usize << m,
                entries.len()
            )));
        }
        if entries[0] != 0 {
            return Err(EfxError::Invalid(
                "table value of the empty bundle must be 0".into(),
            ));
        }
        Ok(Valuation {
            m,
            repr: Repr::Table(entries),
        })
    }

    /// Number of goods this valuation is defined over.
    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> ValuationKind {
        match self.repr {
            Repr::Additive(_) => ValuationKind::Additive,
            Repr::Table(_) => ValuationKind::Table,
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self.repr, Repr::Additive(_))
    }

    /// Per-good weights of an additive valuation.
    pub fn weights(&self) -> Option<&[Value]> {
        match &self.repr {
            Repr::Additive(w) => Some(w),
            Repr::Table(_) => None,
        }
    }

    /// Raw entries of a table valuation.
    pub fn entries(&self) -> Option<&[Value]> {
        match &self.repr {
            Repr::Additive(_) => None,
            Repr::Table(t) => Some(t),
        }
    }

    /// Value of a bundle. The bundle must lie within `0..m`.
    #[inline]
    pub fn value(&self, s: Bundle) -> Value {
        debug_assert!(
            s.is_subset(Bundle::full(self.m)),
            "{s:?} outside 0..{}",
            self.m
        );
        match &self.repr {
            Repr::Additive(w) => s.iter().map(|g| w[g]).sum(),
            Repr::Table(t) => t[s.bits() as usize],
        }
    }

    /// Checked form of [`Valuation::value`].
    pub fn try_value(&self, s: Bundle) -> Result<Value> {
        if !s.is_subset(Bundle::full(self.m)) {
            return Err(EfxError::Precondition(format!(
                "bundle {s:?} is not a subset of goods 0..{}",
                self.m
            )));
        }
        Ok(self.value(s))
    }

    /// `v(S) <= v(S ∪ g)` for every `S` and `g`.
    pub fn is_monotone(&self) -> bool {
        self.is_monotone_on(Bundle::full(self.m))
    }

    /// Monotonicity restricted to subsets of `ground`.
    pub fn is_monotone_on(&self, ground: Bundle) -> bool {
        match &self.repr {
            Repr::Additive(_) => true,
            Repr::Table(t) => ground.subsets().all(|s| {
                ground
                    .difference(s)
                    .iter()
                    .all(|g| t[s.bits() as usize] <= t[s.with(g).bits() as usize])
            }),
        }
    }

    /// Values of all `2^m` bundles, indexed by bitmask.
    pub fn all_values(&self, cap_goods: usize) -> Result<Vec<Value>> {
        if self.m > cap_goods {
            return Err(EfxError::CapExceeded {
                what: "subset enumeration goods",
                size: self.m as u128,
                cap: cap_goods as u128,
            });
        }
        match &self.repr {
            Repr::Table(t) => Ok(t.clone()),
            Repr::Additive(w) => {
                let mut sums = vec![0 as Value; 1usize << self.m];
                for mask in 1..sums.len() {
                    let low = mask.trailing_zeros() as usize;
                    sums[mask] = sums[mask & (mask - 1)] + w[low];
                }
                Ok(sums)
            }
        }
    }

    /// True iff no two distinct bundles have the same value.
    pub fn is_nondegenerate(&self, cap_goods: usize) -> Result<bool> {
        let mut values = self.all_values(cap_goods)?;
        values.sort_unstable();
        Ok(values.windows(2).all(|w| w[0] != w[1]))
    }

    /// `v'(S) = v(S)·2^m + Σ_{g∈S} 2^g`. Distinct bundles get distinct values
    /// and strict preferences of `v'` are weak preferences of `v`.
    pub fn perturbed(&self) -> Result<Valuation> {
        let m = self.m;
        let scale: Value = 1 << m;
        let repr = match &self.repr {
            Repr::Additive(w) => {
                let w = w
                    .iter()
                    .enumerate()
                    .map(|(g, &x)| {
                        x.checked_mul(scale)
                            .and_then(|y| y.checked_add(1 << g))
                            .ok_or(EfxError::Overflow("perturbation"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                w.iter()
                    .try_fold(0 as Value, |acc, &x| acc.checked_add(x))
                    .ok_or(EfxError::Overflow("perturbation"))?;
                Repr::Additive(w)
            }
            Repr::Table(t) => Repr::Table(
                t.iter()
                    .enumerate()
                    .map(|(mask, &x)| {
                        x.checked_mul(scale)
                            .and_then(|y| y.checked_add(mask as Value))
                            .ok_or(EfxError::Overflow("perturbation"))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Valuation { m, repr })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    /// Key into [`Instance::valuations`].
    pub valuation: String,
}

/// A fair division instance: `m` goods, a list of agents, and the valuations
/// they reference. Several agents may reference the same valuation id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    agents: Vec<Agent>,
    valuations: BTreeMap<String, Valuation>,
}

impl Instance {
    pub fn new(
        m: usize,
        agents: Vec<Agent>,
        valuations: BTreeMap<String, Valuation>,
    ) -> Result<Self> {
        if m > MAX_GOODS {
            return Err(EfxError::Invalid(format!(
                "{m} goods; at most {MAX_GOODS} are supported"
            )));
        }
        if agents.is_empty() {
            return Err(EfxError::Invalid(
                "an instance needs at least one agent".into(),
            ));
        }
        let mut names = BTreeSet::new();
        for a in &agents {
            if !names.insert(a.name.as_str()) {
                return Err(EfxError::Invalid(format!(
                    "duplicate agent name {:?}",
                    a.name
                )));
            }
            if !valuations.contains_key(&a.valuation) {
                return Err(EfxError::Invalid(format!(
                    "agent {:?} references unknown valuation {:?}",
                    a.name, a.valuation
                )));
            }
        }
        for (id, v) in &valuations {
            if v.goods() != m {
                return Err(EfxError::Invalid(format!(
                    "valuation {id:?} is over {} goods, instance has {m}",
                    v.goods()
                )));
            }
        }
        Ok(Instance {
            m,
            agents,
            valuations,
        })
    }

    /// Instance where agent `i` is named `a{i}` and uses valuation `v{i}`.
    pub fn from_valuations(valuations: Vec<Valuation>) -> Result<Self> {
        let m = valuations.first().map_or(0, Valuation::goods);
        let agents = (0..valuations.len())
            .map(|i| Agent {
                name: format!("a{i}"),
                valuation: format!("v{i}"),
            })
            .collect();
        let map = valuations
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("v{i}"), v))
            .collect();
        Instance::new(m, agents, map)
    }

    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn valuations(&self) -> &BTreeMap<String, Valuation> {
        &self.valuations
    }

    /// Valuation used by agent `i`.
    pub fn valuation_of(&self, agent: usize) -> &Valuation {
        &self.valuations[&self.agents[agent].valuation]
    }

    pub fn all_goods(&self) -> Bundle {
        Bundle::full(self.m)
    }

    /// Same agents, every valuation replaced by its perturbed form.
    pub fn perturbed(&self) -> Result<Instance> {
        let valuations = self
            .valuations
            .iter()
            .map(|(id, v)| Ok((id.clone(), v.perturbed()?)))
            .collect::<Result<_>>()?;
        Ok(Instance {
            m: self.m,
            agents: self.agents.clone(),
            valuations,
        })
    }
}

/// `n` bundles plus the agent → bundle assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    /// `assignment[agent]` is the index of that agent's bundle.
    pub assignment: Vec<usize>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>, assignment: Vec<usize>) -> Self {
        Allocation {
            bundles,
            assignment,
        }
    }

    /// Agent `i` receives bundle `i`.
    pub fn identity(bundles: Vec<Bundle>) -> Self {
        let assignment = (0..bundles.len()).collect();
        Allocation {
            bundles,
            assignment,
        }
    }

    pub fn bundle_of(&self, agent: usize) -> Bundle {
        self.bundles[self.assignment[agent]]
    }

    /// Bundles reordered so that entry `i` belongs to agent `i`.
    pub fn per_agent(&self) -> Vec<Bundle> {
        self.assignment.iter().map(|&b| self.bundles[b]).collect()
    }
}

/// Complete allocation check: one bundle per agent, pairwise disjoint, covering
/// every good, with a bijective assignment.
pub fn validate_allocation(inst: &Instance, x: &Allocation) -> bool {
    allocation_problem(inst, x).is_none()
}

/// Description of the first defect found by [`validate_allocation`].
pub fn allocation_problem(inst: &Instance, x: &Allocation) -> Option<String> {
    let n = inst.agent_count();
    if x.bundles.len() != n {
        return Some(format!("{} bundles for {n} agents", x.bundles.len()));
    }
    if x.assignment.len() != n {
        return Some(format!("{} assignments for {n} agents", x.assignment.len()));
    }
    let mut seen = vec![false; n];
    for (agent, &b) in x.assignment.iter().enumerate() {
        if b >= n || std::mem::replace(&mut seen[b], true) {
            return Some(format!(
                "assignment of agent {agent} to bundle {b} is not a bijection"
            ));
        }
    }
    let all = inst.all_goods();
    let mut union = Bundle::EMPTY;
    for (i, &b) in x.bundles.iter().enumerate() {
        if !b.is_subset(all) {
            return Some(format!(
                "bundle {i} contains goods outside 0..{}",
                inst.goods()
            ));
        }
        if !union.is_disjoint(b) {
            return Some(format!("bundle {i} overlaps an earlier bundle"));
        }
        union = union.union(b);
    }
    if union != all {
        return Some(format!("goods {:?} are unallocated", all.difference(union)));
    }
    None
}
