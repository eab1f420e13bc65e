//! Traces, realisability, reachability over (state, lattice) configurations,
//! objective validity and the brute-force minimal-trace oracle.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::dprn::Dprn;
use crate::error::CoreError;
use crate::network::{enabled_in_state, ComponentId, Prn, RegulatorState, State, Transition, Value};
use crate::params::{
    enabled_by_bounds, psi_abstract_from, psi_concrete, restrict_in_place, ConcreteParametrisationSet,
    ParametrisationLattice,
};
use crate::reduction::Objective;

/// A start state and a sequence of transitions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace {
    pub start: State,
    pub steps: Vec<Transition>,
}

impl Trace {
    pub fn new(start: State, steps: Vec<Transition>) -> Trace {
        Trace { start, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every state along the trace, start included. Fails at the first step
    /// that is malformed or not enabled at its position.
    pub fn states(&self, prn: &Prn) -> Result<Vec<State>, CoreError> {
        prn.check_state(&self.start)?;
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut x = self.start.clone();
        for (step, t) in self.steps.iter().enumerate() {
            if prn.check_transition(t).is_err() || !enabled_in_state(prn, t, &x) {
                return Err(CoreError::InvalidTrace { step });
            }
            let next = x.with(t.component, t.to);
            out.push(core::mem::replace(&mut x, next));
        }
        out.push(x);
        Ok(out)
    }

    pub fn end(&self, prn: &Prn) -> Result<State, CoreError> {
        Ok(self.states(prn)?.pop().unwrap_or_else(|| self.start.clone()))
    }

    /// The set of distinct transitions of the trace.
    pub fn transition_set(&self) -> BTreeSet<&Transition> {
        self.steps.iter().collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for t in &self.steps {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Realisability under the lattice semantics, starting from `initial`.
pub fn trace_realisable(prn: &Prn, trace: &Trace, initial: &ParametrisationLattice) -> Result<bool, CoreError> {
    trace.states(prn)?;
    Ok(!psi_abstract_from(prn, initial, trace.transition_set()).is_empty())
}

/// Realisability under the explicit semantics over `base`.
pub fn trace_realisable_concrete(
    prn: &Prn,
    trace: &Trace,
    base: &ConcreteParametrisationSet,
) -> Result<bool, CoreError> {
    trace.states(prn)?;
    Ok(!psi_concrete(prn, base, trace.transition_set()).is_empty())
}

/// Target `component = value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Goal {
    pub component: ComponentId,
    pub value: Value,
}

impl Goal {
    pub fn holds(&self, x: &State) -> bool {
        x[self.component] == self.value
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Each configuration carries the lattice folded along its path.
    #[default]
    Exact,
    /// Plain state graph under the starting lattice.
    Approximate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// Maximal number of distinct configurations; `None` is unbounded.
    pub budget: Option<usize>,
    /// Skip configurations whose lattice is included in an already visited
    /// lattice for the same state.
    pub subsumption: bool,
    /// Keep exploring after the goal is found so the statistics cover the
    /// whole reachable configuration space.
    pub exhaustive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Reached,
    Unreached,
    /// The budget ran out before a verdict was reached.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachOutcome {
    pub verdict: Verdict,
    /// Distinct states among the explored configurations.
    pub states: usize,
    /// Distinct configurations explored.
    pub configurations: usize,
    /// Shortest witness found by the breadth-first search.
    pub witness: Option<Trace>,
}

struct Node {
    state: State,
    lattice: ParametrisationLattice,
    phase: u8,
    parent: Option<(usize, Transition)>,
}

struct Search {
    opts: SearchOptions,
    nodes: Vec<Node>,
    visited: BTreeSet<(u8, State, ParametrisationLattice)>,
    dominating: BTreeMap<(u8, State), Vec<ParametrisationLattice>>,
    states: BTreeSet<State>,
}

enum SearchEnd {
    Accepted(usize),
    Exhausted,
    OutOfBudget,
}

impl Search {
    /// Breadth-first search over `(phase, state, lattice)`. `advance` maps the
    /// phase of the predecessor and the new state to the new phase; the
    /// search accepts in phase `accept`.
    fn run(
        dprn: &Dprn,
        x: &State,
        lattice0: &ParametrisationLattice,
        opts: SearchOptions,
        advance: impl Fn(u8, &State) -> u8,
        accept: u8,
    ) -> (Search, SearchEnd) {
        let mut s = Search {
            opts,
            nodes: Vec::new(),
            visited: BTreeSet::new(),
            dominating: BTreeMap::new(),
            states: BTreeSet::new(),
        };
        let mut found = None;
        let mut queue = VecDeque::new();
        let phase = advance(0, x);
        if !lattice0.is_empty() {
            let root = s.insert(x.clone(), lattice0.clone(), phase, None);
            queue.push_back(root.unwrap());
            if phase == accept {
                found = Some(0);
            }
        }
        let prn = dprn.prn();
        while let Some(idx) = queue.pop_front() {
            if found.is_some() && !opts.exhaustive {
                break;
            }
            let (state, lattice, phase) = {
                let n = &s.nodes[idx];
                (n.state.clone(), n.lattice.clone(), n.phase)
            };
            for v in prn.components() {
                let from = state[v];
                let omega = prn.regulator_index_in(state.values(), v);
                for (increasing, to) in [(true, from.checked_add(1)), (false, from.checked_sub(1))] {
                    let Some(to) = to.filter(|&to| to <= prn.max(v)) else {
                        continue;
                    };
                    if !dprn.allows_at(v, omega, from, increasing)
                        || !enabled_by_bounds(prn, &lattice, v, omega, increasing, to)
                    {
                        continue;
                    }
                    let mut next_lattice = lattice.clone();
                    if opts.mode == SearchMode::Exact {
                        restrict_in_place(prn, &mut next_lattice, v, omega, increasing, to);
                        if next_lattice.is_empty() {
                            continue;
                        }
                    }
                    let next = state.with(v, to);
                    let next_phase = advance(phase, &next);
                    let t = Transition::new(v, from, to, RegulatorState::new(v, prn.decode_regulator_values(v, omega)));
                    if let Some(child) = s.insert(next, next_lattice, next_phase, Some((idx, t))) {
                        if next_phase == accept && found.is_none() {
                            found = Some(child);
                        }
                        if opts.budget.is_some_and(|b| s.nodes.len() > b) {
                            return (s, found.map_or(SearchEnd::OutOfBudget, SearchEnd::Accepted));
                        }
                        queue.push_back(child);
                    }
                }
            }
        }
        (s, found.map_or(SearchEnd::Exhausted, SearchEnd::Accepted))
    }

    fn insert(
        &mut self,
        state: State,
        lattice: ParametrisationLattice,
        phase: u8,
        parent: Option<(usize, Transition)>,
    ) -> Option<usize> {
        if self.opts.subsumption {
            let seen = self.dominating.entry((phase, state.clone())).or_default();
            if seen.iter().any(|l| lattice.is_subset_of(l)) {
                return None;
            }
            seen.retain(|l| !l.is_subset_of(&lattice));
            seen.push(lattice.clone());
        } else if !self.visited.insert((phase, state.clone(), lattice.clone())) {
            return None;
        }
        self.states.insert(state.clone());
        self.nodes.push(Node {
            state,
            lattice,
            phase,
            parent,
        });
        Some(self.nodes.len() - 1)
    }

    fn witness(&self, mut idx: usize) -> Trace {
        let mut steps = Vec::new();
        while let Some((parent, t)) = &self.nodes[idx].parent {
            steps.push(t.clone());
            idx = *parent;
        }
        steps.reverse();
        Trace::new(self.nodes[idx].state.clone(), steps)
    }
}

/// Whether some realisable trace of `dprn` from `x` reaches `goal`.
pub fn reachable(
    dprn: &Dprn,
    x: &State,
    goal: Goal,
    lattice0: &ParametrisationLattice,
    opts: SearchOptions,
) -> ReachOutcome {
    let (search, end) = Search::run(dprn, x, lattice0, opts, |_, s| u8::from(goal.holds(s)), 1);
    let (verdict, witness) = match end {
        SearchEnd::Accepted(idx) => (Verdict::Reached, Some(search.witness(idx))),
        SearchEnd::Exhausted => (Verdict::Unreached, None),
        SearchEnd::OutOfBudget => (Verdict::Unknown, None),
    };
    ReachOutcome {
        verdict,
        states: search.states.len(),
        configurations: search.nodes.len(),
        witness,
    }
}

/// Validity of `obj` in `x`: trivially when `from = to`, otherwise some
/// realisable trace visits value `from` (possibly at `x` itself) and then
/// ends with value `to`.
pub fn objective_valid(
    dprn: &Dprn,
    obj: &Objective,
    x: &State,
    lattice0: &ParametrisationLattice,
    opts: SearchOptions,
) -> Result<bool, CoreError> {
    objective_search(dprn, obj, x, lattice0, opts).0
}

/// [`objective_valid`] plus the number of configurations explored.
pub(crate) fn objective_search(
    dprn: &Dprn,
    obj: &Objective,
    x: &State,
    lattice0: &ParametrisationLattice,
    opts: SearchOptions,
) -> (Result<bool, CoreError>, usize) {
    if obj.from == obj.to {
        return (Ok(true), 0);
    }
    let v = obj.component;
    let advance = |phase: u8, s: &State| match phase {
        0 if s[v] == obj.from => 1,
        1 if s[v] == obj.to => 2,
        p => p,
    };
    let opts = SearchOptions {
        exhaustive: false,
        ..opts
    };
    let (search, end) = Search::run(dprn, x, lattice0, opts, advance, 2);
    let explored = search.nodes.len();
    let r = match end {
        SearchEnd::Accepted(_) => Ok(true),
        SearchEnd::Exhausted => Ok(false),
        SearchEnd::OutOfBudget => Err(CoreError::BudgetExhausted { explored }),
    };
    (r, explored)
}

/// `true` unless some strictly shorter candidate embeds into `trace` as an
/// order-preserving subsequence.
pub fn is_minimal(trace: &Trace, candidates: &[Trace]) -> bool {
    !candidates
        .iter()
        .any(|rho| rho.len() < trace.len() && rho.start == trace.start && is_subsequence(&rho.steps, &trace.steps))
}

fn is_subsequence<T: PartialEq>(small: &[T], big: &[T]) -> bool {
    let mut it = big.iter();
    small.iter().all(|a| it.any(|b| b == a))
}

/// All minimal realisable traces from `x` to `goal` of length at most
/// `max_len`, under the explicit semantics over `base`, sorted by length and
/// then lexicographically. Minimality is relative to the length bound.
pub fn enumerate_minimal_traces(
    prn: &Prn,
    base: &ConcreteParametrisationSet,
    x: &State,
    goal: Goal,
    max_len: usize,
) -> Vec<Trace> {
    let mut oracle = TraceOracle {
        prn,
        goal,
        max_len,
        ids: BTreeMap::new(),
        transitions: Vec::new(),
        found: Vec::new(),
    };
    if !base.is_empty() {
        oracle.dfs(x.clone(), base, &mut Vec::new());
    }
    let candidates: BTreeSet<Vec<u32>> = oracle.found.iter().cloned().collect();
    let mut out: Vec<Trace> = oracle
        .found
        .iter()
        .filter(|ids| !has_shorter_candidate(ids, &candidates))
        .map(|ids| {
            Trace::new(
                x.clone(),
                ids.iter().map(|&i| oracle.transitions[i as usize].clone()).collect(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.steps.cmp(&b.steps)));
    out
}

fn has_shorter_candidate(ids: &[u32], candidates: &BTreeSet<Vec<u32>>) -> bool {
    let n = ids.len();
    if n == 0 {
        return false;
    }
    let full: u64 = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut sub = Vec::with_capacity(n);
    // Iterates over every proper subset of positions.
    let mut mask = full;
    while mask != 0 {
        mask = (mask - 1) & full;
        sub.clear();
        sub.extend((0..n).filter(|k| mask >> k & 1 == 1).map(|k| ids[k]));
        if candidates.contains(&sub) {
            return true;
        }
        if mask == 0 {
            break;
        }
    }
    false
}

struct TraceOracle<'a> {
    prn: &'a Prn,
    goal: Goal,
    max_len: usize,
    ids: BTreeMap<Transition, u32>,
    transitions: Vec<Transition>,
    found: Vec<Vec<u32>>,
}

impl TraceOracle<'_> {
    fn dfs(&mut self, x: State, set: &ConcreteParametrisationSet, path: &mut Vec<u32>) {
        if self.goal.holds(&x) {
            self.found.push(path.clone());
            return;
        }
        if path.len() == self.max_len {
            return;
        }
        let prn = self.prn;
        for v in prn.components() {
            let from = x[v];
            for to in [from.checked_add(1), from.checked_sub(1)] {
                let Some(to) = to.filter(|&to| to <= prn.max(v)) else {
                    continue;
                };
                let t = Transition::new(v, from, to, prn.project(&x, v));
                if !set.enables(prn, &t) {
                    continue;
                }
                let next_set = set.restrict(prn, &t);
                let id = self.intern(t);
                path.push(id);
                self.dfs(x.with(v, to), &next_set, path);
                path.pop();
            }
        }
    }

    fn intern(&mut self, t: Transition) -> u32 {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.transitions.len() as u32;
        self.transitions.push(t.clone());
        self.ids.insert(t, id);
        id
    }
}
