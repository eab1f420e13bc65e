//! Objectives, objective transition sets and the goal-oriented reduction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::cover::{compute_cover_set, PartialRegulatorState, RegulationCoverSet, ValueChange};
use crate::dprn::{dprn_enabled, Dprn};
use crate::dynamics::{enumerate_minimal_traces, objective_search, Goal, SearchOptions, Trace};
use crate::error::CoreError;
use crate::network::{ComponentId, Prn, State, Value};
use crate::params::{enabled_by_lattice, restrict_lattice, ConcreteParametrisationSet, ParametrisationLattice};

/// Drive `component` from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Objective {
    pub component: ComponentId,
    pub from: Value,
    pub to: Value,
}

impl Objective {
    pub fn new(component: ComponentId, from: Value, to: Value) -> Self {
        Objective { component, from, to }
    }

    /// `-1`, `0` or `+1`.
    pub fn sign(&self) -> i8 {
        (self.to as i16 - self.from as i16).signum() as i8
    }

    /// The value changes an objective may use: unit steps in its direction
    /// between its two values.
    pub fn value_changes(&self) -> Vec<ValueChange> {
        let (lo, hi) = (self.from.min(self.to), self.from.max(self.to));
        (lo..hi)
            .map(|k| {
                if self.to > self.from {
                    ValueChange::new(self.component, k, k + 1)
                } else {
                    ValueChange::new(self.component, k + 1, k)
                }
            })
            .collect()
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}~>{}", self.component, self.from, self.to)
    }
}

/// A value change together with a partial regulator state enabling it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialTransition {
    pub change: ValueChange,
    pub partial: PartialRegulatorState,
}

/// Rule that introduced an objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// The goal objective.
    Seed,
    /// A regulator value required by a valid partial transition.
    Regulator,
    /// A bridge from a value reached by a valid partial transition to the
    /// target of another objective on the same component.
    Bridge,
}

/// Objectives in insertion order with the rule and parent that added them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObjectiveSet {
    pub members: Vec<Objective>,
    pub provenance: BTreeMap<Objective, (Rule, Option<Objective>)>,
}

impl ObjectiveSet {
    pub fn contains(&self, obj: &Objective) -> bool {
        self.provenance.contains_key(obj)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn insert(&mut self, obj: Objective, rule: Rule, parent: Option<Objective>) -> bool {
        if self.contains(&obj) {
            return false;
        }
        self.members.push(obj);
        self.provenance.insert(obj, (rule, parent));
        true
    }
}

/// Regulation cover sets per value change, computed on first use against
/// the enabling predicate of a fixed lattice.
#[derive(Clone, Debug, Default)]
pub struct CoverCache {
    sets: BTreeMap<ValueChange, RegulationCoverSet>,
}

impl CoverCache {
    pub fn get(&mut self, prn: &Prn, lattice: &ParametrisationLattice, change: ValueChange) -> &RegulationCoverSet {
        self.sets
            .entry(change)
            .or_insert_with(|| compute_cover_set(prn, change, |w| enabled_by_lattice(prn, &change.transition(w.clone()), lattice)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &RegulationCoverSet> {
        self.sets.values()
    }
}

/// The model, starting lattice and search settings shared by the validity
/// queries of one reduction, with memoised cover sets and validity answers.
#[derive(Clone, Debug)]
pub struct ReductionContext<'a> {
    pub dprn: &'a Dprn,
    /// Validity witnesses are searched in the unrestricted network; the
    /// input limits only apply to the final limit vectors.
    open: Dprn,
    pub lattice0: ParametrisationLattice,
    pub search: SearchOptions,
    pub covers: CoverCache,
    validity: BTreeMap<(State, Objective), Option<bool>>,
    explored: usize,
}

impl<'a> ReductionContext<'a> {
    pub fn new(dprn: &'a Dprn, lattice0: ParametrisationLattice, search: SearchOptions) -> Self {
        ReductionContext {
            dprn,
            open: Dprn::unrestricted(dprn.prn().clone()),
            lattice0,
            search,
            covers: CoverCache::default(),
            validity: BTreeMap::new(),
            explored: 0,
        }
    }

    fn cover(&mut self, change: ValueChange) -> &RegulationCoverSet {
        self.covers.get(self.dprn.prn(), &self.lattice0, change)
    }

    /// Validity of `obj` in `x`; `None` when the search budget ran out.
    fn validity(&mut self, x: &State, obj: Objective) -> Option<bool> {
        let key = (x.clone(), obj);
        if let Some(&v) = self.validity.get(&key) {
            return v;
        }
        let (r, explored) = objective_search(&self.open, &obj, x, &self.lattice0, self.search);
        self.explored += explored;
        let v = match r {
            Ok(v) => Some(v),
            Err(CoreError::BudgetExhausted { .. }) => None,
            Err(_) => Some(false),
        };
        self.validity.insert(key, v);
        v
    }

    /// Number of distinct validity queries answered so far.
    pub fn validity_queries(&self) -> usize {
        self.validity.len()
    }

    /// Search configurations explored by validity queries so far.
    pub fn explored_configurations(&self) -> usize {
        self.explored
    }

    /// Number of validity queries that ran out of budget so far.
    pub fn unknown_validity(&self) -> usize {
        self.validity.values().filter(|v| v.is_none()).count()
    }
}

/// Every partial transition of the cover sets of the value changes `obj` may use.
pub fn objective_transition_set(ctx: &mut ReductionContext<'_>, obj: &Objective) -> Vec<PartialTransition> {
    let mut out = Vec::new();
    for change in obj.value_changes() {
        for partial in &ctx.cover(change).members {
            out.push(PartialTransition {
                change,
                partial: partial.clone(),
            });
        }
    }
    out
}

/// The partial transitions of `obj` whose every specified regulator value
/// `k` of a regulator `u` gives a valid objective `u: x[u] ~> k` in `x`.
/// Validity queries that exhaust the budget count as valid, which can only
/// keep more transitions.
pub fn valid_objective_transition_set(
    ctx: &mut ReductionContext<'_>,
    x: &State,
    obj: &Objective,
) -> Vec<PartialTransition> {
    let prn = ctx.dprn.prn().clone();
    let mut out = Vec::new();
    for pt in objective_transition_set(ctx, obj) {
        let regs = prn.regulators(obj.component);
        let valid = regs.iter().zip(&pt.partial.entries).all(|(&u, e)| match e {
            Some(k) => ctx.validity(x, Objective::new(u, x[u], *k)) != Some(false),
            None => true,
        });
        if valid {
            out.push(pt);
        }
    }
    out
}

/// Outcome of [`compute_objective_closure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveClosure {
    pub objectives: ObjectiveSet,
    /// Valid partial transitions of each objective, in objective order.
    pub valid: Vec<(Objective, Vec<PartialTransition>)>,
}

/// Least set of objectives containing the goal objective and closed under
/// the regulator and bridge rules.
pub fn compute_objective_closure(ctx: &mut ReductionContext<'_>, x: &State, goal: Goal) -> ObjectiveClosure {
    let prn = ctx.dprn.prn().clone();
    let mut set = ObjectiveSet::default();
    let mut valid: BTreeMap<Objective, Vec<PartialTransition>> = BTreeMap::new();
    set.insert(Objective::new(goal.component, x[goal.component], goal.value), Rule::Seed, None);
    loop {
        let mut added = false;
        let mut i = 0;
        while i < set.members.len() {
            let obj = set.members[i];
            i += 1;
            if !valid.contains_key(&obj) {
                let pts = valid_objective_transition_set(ctx, x, &obj);
                valid.insert(obj, pts);
            }
            let pts = valid[&obj].clone();
            for pt in &pts {
                for (&u, e) in prn.regulators(obj.component).iter().zip(&pt.partial.entries) {
                    if let (Some(k), true) = (e, u != obj.component) {
                        added |= set.insert(Objective::new(u, x[u], *k), Rule::Regulator, Some(obj));
                    }
                }
            }
            for pt in &pts {
                let siblings: Vec<Objective> = set
                    .members
                    .iter()
                    .filter(|o| o.component == obj.component && **o != obj)
                    .copied()
                    .collect();
                for other in siblings {
                    let bridge = Objective::new(obj.component, pt.change.to, other.to);
                    added |= set.insert(bridge, Rule::Bridge, Some(obj));
                }
            }
        }
        if !added {
            break;
        }
    }
    let valid = set.members.iter().map(|o| (*o, valid.remove(o).unwrap_or_default())).collect();
    ObjectiveClosure { objectives: set, valid }
}

/// Outcome of [`reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub dprn: Dprn,
    pub closure: ObjectiveClosure,
    /// Distinct valid partial transitions in order of discovery.
    pub transitions: Vec<PartialTransition>,
    /// Validity queries answered optimistically after exhausting the budget.
    pub unknown_validity: usize,
}

/// Reduces `ctx.dprn` for reaching `goal` from `x`: activation limits become
/// the largest value reached by a valid increasing partial transition
/// containing the regulator state (`-inf` if none), inhibition limits the
/// smallest value reached by a valid decreasing one (`+inf` if none). The
/// new limits are intersected with the limits of the input.
pub fn reduce(ctx: &mut ReductionContext<'_>, x: &State, goal: Goal) -> ReductionResult {
    let closure = compute_objective_closure(ctx, x, goal);
    let prn = ctx.dprn.prn();
    let mut transitions: Vec<PartialTransition> = Vec::new();
    for (_, pts) in &closure.valid {
        for pt in pts {
            if !transitions.contains(pt) {
                transitions.push(pt.clone());
            }
        }
    }
    let n = prn.parameter_count();
    let mut activation: Vec<Option<Value>> = alloc::vec![None; n];
    let mut inhibition: Vec<Option<Value>> = alloc::vec![None; n];
    for pt in &transitions {
        let v = pt.change.component;
        for omega in pt.partial.members(prn) {
            let idx = prn.parameter_index(v, omega.index(prn));
            if pt.change.is_increasing() {
                activation[idx] = activation[idx].max(Some(pt.change.to));
            } else {
                inhibition[idx] = Some(inhibition[idx].map_or(pt.change.to, |l| l.min(pt.change.to)));
            }
        }
    }
    let input = ctx.dprn;
    for idx in 0..n {
        activation[idx] = activation[idx].min(input.activation_limits()[idx]);
        inhibition[idx] = match (inhibition[idx], input.inhibition_limits()[idx]) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    let dprn = Dprn::with_limits(prn.clone(), activation, inhibition).expect("limit vectors sized by the network");
    ReductionResult {
        dprn,
        closure,
        transitions,
        unknown_validity: ctx.unknown_validity(),
    }
}

/// A step of a minimal trace that the reduction failed to preserve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationViolation {
    pub trace: Trace,
    pub step: usize,
    /// No valid partial transition matches the step.
    pub unmatched: bool,
    /// The step is not enabled in the reduced model along the trace.
    pub disabled: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub traces: Vec<Trace>,
    pub reduction: Option<ReductionResult>,
    pub violations: Vec<PreservationViolation>,
}

impl PreservationReport {
    pub fn is_preserved(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerates the minimal traces under `base`, reduces the unrestricted
/// model with the hull of `base` as starting lattice, and checks that every
/// step of every minimal trace is matched by a valid partial transition and
/// stays enabled in the reduced model along its trace.
pub fn preservation_check(
    prn: &Prn,
    base: &ConcreteParametrisationSet,
    x: &State,
    goal: Goal,
    max_len: usize,
    search: SearchOptions,
) -> PreservationReport {
    let traces = enumerate_minimal_traces(prn, base, x, goal, max_len);
    let Some(lattice0) = base.hull(prn) else {
        return PreservationReport {
            traces,
            reduction: None,
            violations: Vec::new(),
        };
    };
    let input = Dprn::unrestricted(prn.clone());
    let mut ctx = ReductionContext::new(&input, lattice0.clone(), search);
    let reduction = reduce(&mut ctx, x, goal);
    let mut violations = Vec::new();
    for trace in &traces {
        let mut lat = lattice0.clone();
        let mut state = trace.start.clone();
        for (step, t) in trace.steps.iter().enumerate() {
            let change = ValueChange::of(t);
            let unmatched = !reduction
                .transitions
                .iter()
                .any(|pt| pt.change == change && pt.partial.contains(&t.regulator_state));
            let disabled = !dprn_enabled(&reduction.dprn, t, &state, &lat);
            if unmatched || disabled {
                violations.push(PreservationViolation {
                    trace: trace.clone(),
                    step,
                    unmatched,
                    disabled,
                });
            }
            lat = restrict_lattice(prn, &lat, t);
            state = state.with(t.component, t.to);
        }
    }
    PreservationReport {
        traces,
        reduction: Some(reduction),
        violations,
    }
}
