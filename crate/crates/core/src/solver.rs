//! EFX allocations when all but two agents share one valuation.
//!
//! The agents split into `n − 2` shared-valuation agents (valuation `va`), one
//! agent `b` with a monotone valuation `vb`, and one agent `c` whose valuation
//! `vc` is MMS-feasible. The solver keeps an *almost EFX-feasible* state:
//!
//! 1. bundles `0..n-1` (sorted ascending under `va`) are each EFX-feasible
//!    under `va` with respect to every other bundle, and
//! 2. the last bundle (the anchor bundle) is EFX-feasible for the anchor agent,
//!    which is `b` or `c`.
//!
//! Each step either finishes with an EFX allocation or produces another such
//! state whose potential (the `va`-value of the poorest of the first `n − 1`
//! bundles) is strictly larger. Every state, transition and final allocation is
//! re-checked; a failed check is reported as [`EfxError::Invariant`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::envy::{
    best_removal_good, feasible_set, is_efx, is_efx_feasible, is_feasible_bundle,
    minimally_envied_subset, strongly_envies,
};
use crate::error::{EfxError, Result};
use crate::model::{Allocation, Bundle, Good, Instance, Valuation, Value};
use crate::oracle::is_mms_feasible;
use crate::pr::{pr, Partition, PrLimits, PrStrategy};

/// Default bound on `m` for checks that enumerate all `2^m` bundles.
pub const DEFAULT_SUBSET_CAP: usize = 20;
/// Default bound on `m` for the `3^m` MMS-feasibility check.
pub const DEFAULT_MMS_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub pr_strategy: PrStrategy,
    pub pr_limits: PrLimits,
    /// Solve the perturbed instance instead of rejecting degenerate input.
    pub auto_perturb: bool,
    pub subset_cap: usize,
    pub mms_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pr_strategy: PrStrategy::default(),
            pr_limits: PrLimits::default(),
            auto_perturb: false,
            subset_cap: DEFAULT_SUBSET_CAP,
            mms_cap: DEFAULT_MMS_CAP,
        }
    }
}

/// Which distinguished agent currently certifies the anchor bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Anchor {
    B,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "INIT")]
    Init,
    /// Some bundle other than the anchor bundle is EFX-feasible for `b` or `c`.
    #[serde(rename = "DONE-ALT")]
    DoneAlt,
    #[serde(rename = "C1.1")]
    C1_1,
    #[serde(rename = "C1.2")]
    C1_2,
    #[serde(rename = "C1.2-PR")]
    C1_2Pr,
    #[serde(rename = "C2.1")]
    C2_1,
    #[serde(rename = "C2.2-PR")]
    C2_2Pr,
    #[serde(rename = "C2.3")]
    C2_3,
    #[serde(rename = "C2.3-MIRROR")]
    C2_3Mirror,
    #[serde(rename = "C2.3-PR")]
    C2_3Pr,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 10] = [
        CaseLabel::Init,
        CaseLabel::DoneAlt,
        CaseLabel::C1_1,
        CaseLabel::C1_2,
        CaseLabel::C1_2Pr,
        CaseLabel::C2_1,
        CaseLabel::C2_2Pr,
        CaseLabel::C2_3,
        CaseLabel::C2_3Mirror,
        CaseLabel::C2_3Pr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Init => "INIT",
            CaseLabel::DoneAlt => "DONE-ALT",
            CaseLabel::C1_1 => "C1.1",
            CaseLabel::C1_2 => "C1.2",
            CaseLabel::C1_2Pr => "C1.2-PR",
            CaseLabel::C2_1 => "C2.1",
            CaseLabel::C2_2Pr => "C2.2-PR",
            CaseLabel::C2_3 => "C2.3",
            CaseLabel::C2_3Mirror => "C2.3-MIRROR",
            CaseLabel::C2_3Pr => "C2.3-PR",
        }
    }

    /// Labels after which the solver stops.
    pub fn is_terminal(self) -> bool {
        matches!(self, CaseLabel::DoneAlt | CaseLabel::C2_1)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    pub case_label: CaseLabel,
    pub phi_before: Value,
    pub phi_after: Value,
    pub anchor_after: Anchor,
    pub moved: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverState {
    /// `n` bundles; the last one is the anchor bundle.
    pub bundles: Vec<Bundle>,
    pub anchor: Anchor,
    pub phi: Value,
}

pub enum Step {
    Done(Allocation),
    Next(SolverState),
}

/// Agent indices for the three roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roles {
    /// The `n − 2` agents that share `va`, in input order.
    pub shared: Vec<usize>,
    pub b: usize,
    pub c: usize,
}

/// Picks the shared class and the `b`/`c` agents.
///
/// Candidate classes are tried by decreasing head count, then by first
/// appearance. The first `n − 2` agents of the class become the shared agents;
/// of the remaining two agents, `c` must be MMS-feasible and is the later one
/// when both are.
pub fn assign_roles(inst: &Instance, mms_cap: usize) -> Result<Roles> {
    let n = inst.agent_count();
    if n < 3 {
        return Err(EfxError::Structure(format!(
            "role assignment needs at least 3 agents, got {n}"
        )));
    }
    let mut classes: Vec<(&str, usize, usize)> = Vec::new();
    for (i, a) in inst.agents().iter().enumerate() {
        match classes.iter_mut().find(|(id, _, _)| *id == a.valuation) {
            Some(entry) => entry.1 += 1,
            None => classes.push((a.valuation.as_str(), 1, i)),
        }
    }
    classes.retain(|&(_, count, _)| count >= n - 2);
    if classes.is_empty() {
        return Err(EfxError::Structure(format!(
            "no valuation is shared by at least {} of the {n} agents",
            n - 2
        )));
    }
    classes.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));

    let mms = |agent: usize| -> Result<bool> {
        let v = inst.valuation_of(agent);
        Ok(v.is_additive() || is_mms_feasible(v, mms_cap)?.feasible)
    };
    for (id, _, _) in classes {
        let shared: Vec<usize> = (0..n)
            .filter(|&i| inst.agents()[i].valuation == id)
            .take(n - 2)
            .collect();
        let extras: Vec<usize> = (0..n).filter(|i| !shared.contains(i)).collect();
        let (e1, e2) = (extras[0], extras[1]);
        if mms(e2)? {
            return Ok(Roles {
                shared,
                b: e1,
                c: e2,
            });
        }
        if mms(e1)? {
            return Ok(Roles {
                shared,
                b: e2,
                c: e1,
            });
        }
    }
    Err(EfxError::Structure(
        "neither agent outside the shared class has an MMS-feasible valuation".into(),
    ))
}

/// Solver over an instance that already satisfies the structural
/// preconditions. Build one with [`Solver::new`].
pub struct Solver<'a> {
    inst: &'a Instance,
    roles: Roles,
    va: &'a Valuation,
    vb: &'a Valuation,
    vc: &'a Valuation,
    config: &'a SolverConfig,
}

impl<'a> Solver<'a> {
    /// Checks roles, monotonicity, `m >= n >= 3` and non-degeneracy.
    pub fn new(inst: &'a Instance, config: &'a SolverConfig) -> Result<Self> {
        Self::build(inst, config, true)
    }

    fn build(inst: &'a Instance, config: &'a SolverConfig, check_degeneracy: bool) -> Result<Self> {
        let roles = assign_roles(inst, config.mms_cap)?;
        let n = inst.agent_count();
        if inst.goods() < n {
            return Err(EfxError::Precondition(format!(
                "the main procedure needs at least as many goods as agents ({} < {n})",
                inst.goods()
            )));
        }
        let va = inst.valuation_of(roles.shared[0]);
        let vb = inst.valuation_of(roles.b);
        let vc = inst.valuation_of(roles.c);
        for (role, v) in [("shared", va), ("b", vb), ("c", vc)] {
            if !v.is_monotone() {
                return Err(EfxError::Structure(format!(
                    "{role} valuation is not monotone"
                )));
            }
            if check_degeneracy && !v.is_nondegenerate(config.subset_cap)? {
                return Err(EfxError::Structure(format!(
                    "{role} valuation is degenerate (two bundles share a value)"
                )));
            }
        }
        Ok(Solver {
            inst,
            roles,
            va,
            vb,
            vc,
            config,
        })
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    fn n(&self) -> usize {
        self.inst.agent_count()
    }

    fn anchor_valuation(&self, anchor: Anchor) -> &Valuation {
        match anchor {
            Anchor::B => self.vb,
            Anchor::C => self.vc,
        }
    }

    /// Sorts the first `n − 1` bundles ascending under `va` and recomputes φ.
    fn make_state(&self, mut bundles: Vec<Bundle>, anchor: Anchor) -> SolverState {
        let last = bundles.len() - 1;
        bundles[..last].sort_by_key(|&b| (self.va.value(b), b));
        let phi = self.va.value(bundles[0]);
        SolverState {
            bundles,
            anchor,
            phi,
        }
    }

    /// Runs the single-valuation routine on `parts` under `va`, lets `c` take
    /// its favorite part as the anchor bundle and sorts the rest.
    fn partition_and_let_c_pick(&self, parts: Vec<Bundle>) -> Result<SolverState> {
        let input = Partition::from_parts(parts)?;
        let mut parts = pr(
            &input,
            self.va,
            self.config.pr_strategy,
            &self.config.pr_limits,
        )?
        .into_parts();
        let pick = (0..parts.len())
            .max_by(|&i, &j| {
                self.vc
                    .value(parts[i])
                    .cmp(&self.vc.value(parts[j]))
                    .then(j.cmp(&i))
            })
            .expect("at least one part");
        let favorite = parts.remove(pick);
        parts.push(favorite);
        Ok(self.make_state(parts, Anchor::C))
    }

    /// Partition of all goods under `va`, with `c` holding its favorite part.
    pub fn initial_state(&self) -> Result<SolverState> {
        let mut parts = vec![Bundle::EMPTY; self.n()];
        parts[0] = self.inst.all_goods();
        self.partition_and_let_c_pick(parts)
    }

    /// φ: `va`-value of the poorest of the first `n − 1` bundles.
    pub fn potential(&self, state: &SolverState) -> Value {
        let last = state.bundles.len() - 1;
        state.bundles[..last]
            .iter()
            .map(|&b| self.va.value(b))
            .min()
            .unwrap_or(0)
    }

    pub fn check_almost_feasible(&self, state: &SolverState) -> bool {
        self.almost_feasible_problem(state).is_none()
    }

    /// First violated state invariant, if any.
    pub fn almost_feasible_problem(&self, state: &SolverState) -> Option<String> {
        let n = self.n();
        let xs = &state.bundles;
        if xs.len() != n {
            return Some(format!("{} bundles for {n} agents", xs.len()));
        }
        let mut union = Bundle::EMPTY;
        for &b in xs {
            if !union.is_disjoint(b) {
                return Some("bundles overlap".into());
            }
            union = union.union(b);
        }
        if union != self.inst.all_goods() {
            return Some("allocation is incomplete".into());
        }
        let last = n - 1;
        if xs[..last]
            .windows(2)
            .any(|w| self.va.value(w[0]) > self.va.value(w[1]))
        {
            return Some("first n-1 bundles are not sorted under the shared valuation".into());
        }
        if state.phi != self.potential(state) {
            return Some(format!(
                "stored potential {} differs from {}",
                state.phi,
                self.potential(state)
            ));
        }
        if let Some(i) = (0..last).find(|&i| !is_feasible_bundle(self.va, xs, i)) {
            return Some(format!(
                "bundle {i} is not EFX-feasible under the shared valuation"
            ));
        }
        if !is_feasible_bundle(self.anchor_valuation(state.anchor), xs, last) {
            return Some(format!(
                "anchor bundle is not EFX-feasible for agent {:?}",
                state.anchor
            ));
        }
        None
    }

    fn ensure_almost_feasible(&self, state: &SolverState, context: &str) -> Result<()> {
        match self.almost_feasible_problem(state) {
            None => Ok(()),
            Some(problem) => Err(EfxError::Invariant(format!("{context}: {problem}"))),
        }
    }

    /// Builds the allocation in which `b` and `c` take the given positions
    /// and the shared agents take the remaining ones in index order.
    fn allocate(&self, bundles: Vec<Bundle>, b_pos: usize, c_pos: usize) -> Allocation {
        let mut assignment = vec![usize::MAX; self.n()];
        assignment[self.roles.b] = b_pos;
        assignment[self.roles.c] = c_pos;
        let free = (0..bundles.len()).filter(|&p| p != b_pos && p != c_pos);
        for (&agent, pos) in self.roles.shared.iter().zip(free) {
            assignment[agent] = pos;
        }
        Allocation::new(bundles, assignment)
    }

    fn certified(&self, x: Allocation, context: &str) -> Result<Allocation> {
        if is_efx(self.inst, &x)? {
            Ok(x)
        } else {
            Err(EfxError::Invariant(format!(
                "{context}: produced allocation is not EFX"
            )))
        }
    }

    /// Finishes if `b` or `c` has an EFX-feasible bundle besides the anchor
    /// bundle. Returns `None` iff the anchor bundle is the only feasible
    /// bundle for both.
    pub fn try_terminate(&self, state: &SolverState) -> Result<Option<Allocation>> {
        let last = state.bundles.len() - 1;
        let fb = feasible_set(&state.bundles, self.vb);
        let fc = feasible_set(&state.bundles, self.vc);
        let other = |f: &[usize]| f.iter().copied().find(|&k| k != last);
        let (b_pos, c_pos) = match (
            fb.contains(&last),
            other(&fc),
            fc.contains(&last),
            other(&fb),
        ) {
            (true, Some(k), _, _) => (last, k),
            (_, _, true, Some(k)) => (k, last),
            _ => return Ok(None),
        };
        let x = self.allocate(state.bundles.clone(), b_pos, c_pos);
        self.certified(x, "termination").map(Some)
    }

    /// One transition from a state in which the anchor bundle is the only
    /// EFX-feasible bundle for both `b` and `c`.
    pub fn step(&self, state: &SolverState, step_no: usize) -> Result<(Step, TraceEvent)> {
        let xs = &state.bundles;
        let last = xs.len() - 1;
        let anchor = xs[last];
        let gb = best_removal_good(self.vb, anchor)?;
        let gc = best_removal_good(self.vc, anchor)?;
        let rest_b = self.vb.value(anchor.without(gb));
        let rest_c = self.vc.value(anchor.without(gc));
        for (who, v, rest) in [("b", self.vb, rest_b), ("c", self.vc, rest_c)] {
            if let Some(i) = (0..last).find(|&i| v.value(xs[i]) >= rest) {
                return Err(EfxError::Invariant(format!(
                    "agent {who} does not strongly envy the anchor bundle over bundle {i}"
                )));
            }
        }

        let first = xs[0];
        let (outcome, label, moved) = if rest_b > self.vb.value(first.with(gb)) {
            self.case_one(state, gb, Anchor::B)?
        } else if rest_c > self.vc.value(first.with(gc)) {
            self.case_one(state, gc, Anchor::C)?
        } else {
            self.case_two(state, gb, gc)?
        };

        let (phi_after, anchor_after) = match &outcome {
            Step::Next(next) => {
                self.ensure_almost_feasible(next, label.as_str())?;
                if next.phi <= state.phi {
                    return Err(EfxError::Invariant(format!(
                        "{label}: potential did not increase ({} -> {})",
                        state.phi, next.phi
                    )));
                }
                (next.phi, next.anchor)
            }
            Step::Done(_) => (state.phi, state.anchor),
        };
        let event = TraceEvent {
            step: step_no,
            case_label: label,
            phi_before: state.phi,
            phi_after,
            anchor_after,
            moved,
        };
        Ok((outcome, event))
    }

    /// The anchor agent still prefers the anchor bundle after giving up good
    /// `g` to the poorest bundle.
    fn case_one(
        &self,
        state: &SolverState,
        g: Good,
        agent: Anchor,
    ) -> Result<(Step, CaseLabel, String)> {
        let xs = &state.bundles;
        let last = xs.len() - 1;
        let grown = xs[0].with(g);
        let shrunk = xs[last].without(g);

        if self.va.value(grown) < self.va.value(xs[1]) {
            let mut bundles = xs.clone();
            bundles[0] = grown;
            bundles[last] = shrunk;
            let moved =
                format!("good {g} from anchor bundle to poorest bundle ({agent:?} keeps anchor)");
            return Ok((
                Step::Next(self.make_state(bundles, agent)),
                CaseLabel::C1_1,
                moved,
            ));
        }

        let kept = minimally_envied_subset(self.va, xs[1], grown)?;
        let overflow = grown.difference(kept);
        let new_anchor = shrunk.union(overflow);
        let mut bundles = xs.clone();
        bundles[0] = kept;
        bundles[last] = new_anchor;
        let moved = format!(
            "good {g} to poorest bundle, overflow {overflow:?} back to anchor bundle ({agent:?} keeps anchor)"
        );
        if (0..last).all(|i| is_efx_feasible(self.va, bundles[i], new_anchor)) {
            Ok((
                Step::Next(self.make_state(bundles, agent)),
                CaseLabel::C1_2,
                moved,
            ))
        } else {
            let next = self.partition_and_let_c_pick(bundles)?;
            Ok((
                Step::Next(next),
                CaseLabel::C1_2Pr,
                format!("{moved}; repartitioned"),
            ))
        }
    }

    /// Neither `b` nor `c` keeps preferring the anchor bundle once it loses
    /// its least important good to the poorest bundle.
    fn case_two(
        &self,
        state: &SolverState,
        gb: Good,
        gc: Good,
    ) -> Result<(Step, CaseLabel, String)> {
        let xs = &state.bundles;
        let last = xs.len() - 1;
        let (first, anchor) = (xs[0], xs[last]);

        let split = Partition::from_parts(vec![first.with(gb), anchor.without(gb)])?;
        let ys = pr(
            &split,
            self.vb,
            self.config.pr_strategy,
            &self.config.pr_limits,
        )?
        .into_parts();
        let (for_b, for_c) = if self.vc.value(ys[1]) > self.vc.value(ys[0]) {
            (ys[0], ys[1])
        } else {
            (ys[1], ys[0])
        };
        let bound = self
            .vc
            .value(first.with(gc))
            .min(self.vc.value(anchor.without(gc)));
        if self.vc.value(for_c) < bound {
            return Err(EfxError::Invariant(
                "c's pick after the two-way split is below its maximin bound".into(),
            ));
        }

        // the poorest bundle that stays with the shared agents
        let witness = xs[1];
        let envies_b_part = strongly_envies(self.va, witness, for_b).strongly_envies;
        let envies_c_part = strongly_envies(self.va, witness, for_c).strongly_envies;
        let mut bundles: Vec<Bundle> = xs[1..last].to_vec();
        let moved = format!(
            "split {:?} into {for_b:?} (b) and {for_c:?} (c)",
            first.union(anchor)
        );

        match (envies_b_part, envies_c_part) {
            (false, false) => {
                bundles.push(for_b);
                bundles.push(for_c);
                let x = self.allocate(bundles, last - 1, last);
                let x = self.certified(x, "C2.1")?;
                Ok((Step::Done(x), CaseLabel::C2_1, moved))
            }
            (true, true) => {
                bundles.push(for_b);
                bundles.push(for_c);
                let next = self.partition_and_let_c_pick(bundles)?;
                Ok((
                    Step::Next(next),
                    CaseLabel::C2_2Pr,
                    format!("{moved}; repartitioned"),
                ))
            }
            (true, false) | (false, true) => {
                let mirrored = envies_c_part;
                let (envied, other, keeper) = if mirrored {
                    (for_c, for_b, Anchor::B)
                } else {
                    (for_b, for_c, Anchor::C)
                };
                let kept = minimally_envied_subset(self.va, witness, envied)?;
                let new_anchor = other.union(envied.difference(kept));
                bundles.push(kept);
                bundles.push(new_anchor);
                let moved = format!(
                    "{moved}; shrink {envied:?} to {kept:?}, overflow to anchor bundle ({keeper:?} keeps anchor)"
                );
                if (0..last).all(|i| is_efx_feasible(self.va, bundles[i], new_anchor)) {
                    let label = if mirrored {
                        CaseLabel::C2_3Mirror
                    } else {
                        CaseLabel::C2_3
                    };
                    Ok((Step::Next(self.make_state(bundles, keeper)), label, moved))
                } else {
                    let next = self.partition_and_let_c_pick(bundles)?;
                    Ok((
                        Step::Next(next),
                        CaseLabel::C2_3Pr,
                        format!("{moved}; repartitioned"),
                    ))
                }
            }
        }
    }

    /// Runs the procedure from the initial state to an EFX allocation.
    pub fn run(&self) -> Result<(Allocation, Vec<TraceEvent>)> {
        let mut state = self.initial_state()?;
        self.ensure_almost_feasible(&state, "INIT")?;
        let mut trace = vec![TraceEvent {
            step: 0,
            case_label: CaseLabel::Init,
            phi_before: state.phi,
            phi_after: state.phi,
            anchor_after: state.anchor,
            moved: "initial partition".into(),
        }];
        let step_bound: u128 = 1u128
            .checked_shl(self.inst.goods() as u32)
            .unwrap_or(u128::MAX);
        loop {
            let step_no = trace.len();
            if let Some(x) = self.try_terminate(&state)? {
                trace.push(TraceEvent {
                    step: step_no,
                    case_label: CaseLabel::DoneAlt,
                    phi_before: state.phi,
                    phi_after: state.phi,
                    anchor_after: state.anchor,
                    moved: "none".into(),
                });
                return Ok((x, trace));
            }
            if step_no as u128 > step_bound {
                return Err(EfxError::Invariant(format!(
                    "more than 2^{} steps",
                    self.inst.goods()
                )));
            }
            let (outcome, event) = self.step(&state, step_no)?;
            trace.push(event);
            match outcome {
                Step::Done(x) => return Ok((x, trace)),
                Step::Next(next) => state = next,
            }
        }
    }
}

/// Result of [`solve`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub allocation: Allocation,
    pub trace: Vec<TraceEvent>,
    /// Whether the perturbed instance was solved.
    pub perturbed: bool,
}

/// Computes an EFX allocation of `inst` and certifies it against the original
/// valuations.
///
/// With fewer goods than agents, good `i` goes to agent `i`. With one agent
/// it gets everything; with two, the first agent's valuation partitions the
/// goods and the second agent picks. Otherwise the main procedure runs.
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<Solution> {
    let n = inst.agent_count();
    let m = inst.goods();
    if n >= 3 {
        // structural class is checked on the original instance for every input
        assign_roles(inst, config.mms_cap)?;
    }
    let working = if config.auto_perturb && m >= n {
        inst.perturbed()?
    } else {
        inst.clone()
    };

    let (allocation, trace) = if m < n {
        let bundles = (0..n)
            .map(|i| {
                if i < m {
                    Bundle::singleton(i)
                } else {
                    Bundle::EMPTY
                }
            })
            .collect();
        (Allocation::identity(bundles), Vec::new())
    } else if n == 1 {
        (Allocation::identity(vec![inst.all_goods()]), Vec::new())
    } else if n == 2 {
        (two_agents(&working, config)?, Vec::new())
    } else {
        let solver = Solver::build(&working, config, !config.auto_perturb)?;
        solver.run()?
    };

    for (which, instance) in [("working", &working), ("original", inst)] {
        if !is_efx(instance, &allocation)? {
            return Err(EfxError::Invariant(format!(
                "final allocation is not EFX under the {which} valuations"
            )));
        }
    }
    Ok(Solution {
        allocation,
        trace,
        perturbed: config.auto_perturb && m >= n,
    })
}

fn two_agents(inst: &Instance, config: &SolverConfig) -> Result<Allocation> {
    let (v0, v1) = (inst.valuation_of(0), inst.valuation_of(1));
    if !v0.is_monotone() || !v1.is_monotone() {
        return Err(EfxError::Structure(
            "two-agent solving needs monotone valuations".into(),
        ));
    }
    let input = Partition::from_parts(vec![inst.all_goods(), Bundle::EMPTY])?;
    let parts = pr(&input, v0, config.pr_strategy, &config.pr_limits)?.into_parts();
    let pick = usize::from(v1.value(parts[1]) > v1.value(parts[0]));
    Ok(Allocation::new(parts, vec![1 - pick, pick]))
}
