//! Partial regulator states, regulation cover sets and the greedy weighted
//! cover construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::network::{ComponentId, Prn, RegulatorState, Transition, Value};

/// A regulator state of `target` with some entries replaced by a wildcard
/// (`None`). It denotes every regulator state matching its specified entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialRegulatorState {
    pub target: ComponentId,
    pub entries: Vec<Option<Value>>,
}

impl PartialRegulatorState {
    pub fn new(target: ComponentId, entries: Vec<Option<Value>>) -> Self {
        PartialRegulatorState { target, entries }
    }

    /// The partial state with no wildcard denoting exactly `omega`.
    pub fn exact(omega: &RegulatorState) -> Self {
        PartialRegulatorState {
            target: omega.target,
            entries: omega.values.iter().map(|&k| Some(k)).collect(),
        }
    }

    pub fn contains(&self, omega: &RegulatorState) -> bool {
        self.target == omega.target && self.contains_values(&omega.values)
    }

    pub fn contains_values(&self, values: &[Value]) -> bool {
        self.entries.len() == values.len()
            && self.entries.iter().zip(values).all(|(e, &k)| e.is_none_or(|e| e == k))
    }

    /// Number of specified (non-wildcard) entries.
    pub fn specified(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn wildcards(&self) -> usize {
        self.entries.len() - self.specified()
    }

    /// Every regulator state of the partial state, lexicographically.
    pub fn members(&self, prn: &Prn) -> Vec<RegulatorState> {
        let regs = prn.regulators(self.target);
        let mut out = alloc::vec![Vec::with_capacity(regs.len())];
        for (e, &u) in self.entries.iter().zip(regs) {
            let choices: Vec<Value> = match e {
                Some(k) => alloc::vec![*k],
                None => (0..=prn.max(u)).collect(),
            };
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Value>| {
                    choices.iter().map(move |&k| {
                        let mut p = prefix.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(|values| RegulatorState::new(self.target, values)).collect()
    }
}

impl fmt::Display for PartialRegulatorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for e in &self.entries {
            match e {
                Some(k) => write!(f, "{k}")?,
                None => f.write_str("*")?,
            }
        }
        f.write_str(">")
    }
}

/// A unit value change `component: from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueChange {
    pub component: ComponentId,
    pub from: Value,
    pub to: Value,
}

impl ValueChange {
    pub fn new(component: ComponentId, from: Value, to: Value) -> Self {
        ValueChange { component, from, to }
    }

    pub fn of(t: &Transition) -> Self {
        ValueChange::new(t.component, t.from, t.to)
    }

    pub fn is_increasing(&self) -> bool {
        self.to > self.from
    }

    pub fn is_valid(&self, prn: &Prn) -> bool {
        self.component.0 < prn.component_count()
            && self.from.max(self.to) <= prn.max(self.component)
            && self.from.abs_diff(self.to) == 1
    }

    pub fn transition(&self, omega: RegulatorState) -> Transition {
        Transition::new(self.component, self.from, self.to, omega)
    }
}

impl fmt::Display for ValueChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}", self.component, self.from, self.to)
    }
}

/// Partial regulator states covering the enabling conditions of a value
/// change, in the order they were chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegulationCoverSet {
    pub change: ValueChange,
    pub members: Vec<PartialRegulatorState>,
}

impl RegulationCoverSet {
    /// Whether some member contains `omega`.
    pub fn admits(&self, omega: &RegulatorState) -> bool {
        self.members.iter().any(|m| m.contains(omega))
    }
}

/// Total number of specified entries over the members.
pub fn spec_count(cs: &RegulationCoverSet) -> usize {
    cs.members.iter().map(PartialRegulatorState::specified).sum()
}

/// `remaining + total / denominator`, compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weight {
    pub remaining: usize,
    pub total: usize,
    pub denominator: usize,
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = (self.remaining * self.denominator + self.total) as u128 * other.denominator as u128;
        let rhs = (other.remaining * other.denominator + other.total) as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Weight of `omega`: the number of enabling single-wildcard partial states
/// containing it that are not yet removed, plus the number of all enabling
/// single-wildcard partial states containing it over `|R(v)| + 1`.
pub fn weight(
    prn: &Prn,
    omega: &RegulatorState,
    enabling_level1: &[PartialRegulatorState],
    removed: &[PartialRegulatorState],
) -> Weight {
    let containing = || enabling_level1.iter().filter(|p| p.contains(omega));
    Weight {
        remaining: containing().filter(|p| !removed.contains(p)).count(),
        total: containing().count(),
        denominator: prn.regulators(omega.target).len() + 1,
    }
}

/// `{ ω | enabling(ω) }` as a cover set of wildcard-free partial states.
pub fn concrete_cover_set(
    prn: &Prn,
    change: ValueChange,
    enabling: impl Fn(&RegulatorState) -> bool,
) -> RegulationCoverSet {
    RegulationCoverSet {
        change,
        members: prn
            .regulator_states(change.component)
            .iter()
            .filter(|w| enabling(w))
            .map(PartialRegulatorState::exact)
            .collect(),
    }
}

/// Checks that every enabling regulator state is covered (some member
/// contains it, and every regulator is specified by some member containing
/// it) and that no member contains a non-enabling regulator state.
pub fn verify_cover_set(prn: &Prn, cs: &RegulationCoverSet, enabling: impl Fn(&RegulatorState) -> bool) -> bool {
    let v = cs.change.component;
    let arity = prn.regulators(v).len();
    if cs.members.iter().any(|m| m.target != v || m.entries.len() != arity) {
        return false;
    }
    let sound = cs
        .members
        .iter()
        .all(|m| m.members(prn).iter().all(|w| enabling(w)));
    sound
        && prn
            .regulator_states(v)
            .iter()
            .filter(|w| enabling(w))
            .all(|w| covered_by(&w.values, cs.members.iter()))
}

fn covered_by<'a>(omega: &[Value], members: impl Iterator<Item = &'a PartialRegulatorState>) -> bool {
    let mut any = false;
    let mut witnessed = alloc::vec![false; omega.len()];
    for m in members.filter(|m| m.contains_values(omega)) {
        any = true;
        for (w, e) in witnessed.iter_mut().zip(&m.entries) {
            *w |= e.is_some();
        }
    }
    any && witnessed.iter().all(|&w| w)
}

/// Greedy construction of a regulation cover set for `change`.
///
/// Enabling regulator states are processed by increasing [`weight`], ties
/// broken lexicographically. Each one is covered either by what was already
/// chosen or by the enabling, not yet removed partial states containing it
/// with the largest number of wildcards that suffices. Afterwards every
/// partial state containing it is removed from consideration.
pub fn compute_cover_set(
    prn: &Prn,
    change: ValueChange,
    enabling: impl Fn(&RegulatorState) -> bool,
) -> RegulationCoverSet {
    CoverBuilder::new(prn, change, enabling).run()
}

struct CoverBuilder<'a> {
    prn: &'a Prn,
    change: ValueChange,
    doms: Vec<usize>,
    strides: Vec<usize>,
    enabling: Vec<bool>,
    processed: Vec<bool>,
    /// Level-one partial states keyed by `(wildcard position, index with that
    /// digit zeroed)`, flattened as `position * |Ω| + index`.
    safe1: Vec<bool>,
    removed1: Vec<bool>,
    total: Vec<usize>,
    remaining: Vec<usize>,
    queue: BTreeSet<(usize, usize)>,
    removed: BTreeSet<Vec<Option<Value>>>,
    safe: BTreeMap<Vec<Option<Value>>, bool>,
    chosen: BTreeSet<Vec<Option<Value>>>,
    members: Vec<PartialRegulatorState>,
}

impl<'a> CoverBuilder<'a> {
    fn new(prn: &'a Prn, change: ValueChange, enabling: impl Fn(&RegulatorState) -> bool) -> Self {
        let v = change.component;
        let n = prn.regulator_state_count(v);
        let doms: Vec<usize> = prn.regulators(v).iter().map(|&u| usize::from(prn.max(u)) + 1).collect();
        let strides = prn.regulator_strides(v);
        let enabling: Vec<bool> = (0..n)
            .map(|i| enabling(&RegulatorState::from_index(prn, v, i)))
            .collect();
        let r = doms.len();
        let mut safe1 = alloc::vec![false; r * n];
        for p in 0..r {
            for base in (0..n).filter(|i| (i / strides[p]) % doms[p] == 0) {
                safe1[p * n + base] = (0..doms[p]).all(|k| enabling[base + k * strides[p]]);
            }
        }
        let mut b = CoverBuilder {
            prn,
            change,
            doms,
            strides,
            enabling,
            processed: alloc::vec![false; n],
            safe1,
            removed1: alloc::vec![false; r * n],
            total: alloc::vec![0; n],
            remaining: alloc::vec![0; n],
            queue: BTreeSet::new(),
            removed: BTreeSet::new(),
            safe: BTreeMap::new(),
            chosen: BTreeSet::new(),
            members: Vec::new(),
        };
        for i in (0..n).filter(|&i| b.enabling[i]) {
            let count = (0..r).filter(|&p| b.safe1[p * n + b.base(i, p)]).count();
            b.total[i] = count;
            b.remaining[i] = count;
            b.queue.insert((b.key(i), i));
        }
        b
    }

    fn n(&self) -> usize {
        self.enabling.len()
    }

    fn digit(&self, i: usize, p: usize) -> usize {
        (i / self.strides[p]) % self.doms[p]
    }

    fn base(&self, i: usize, p: usize) -> usize {
        i - self.digit(i, p) * self.strides[p]
    }

    /// Weight scaled by `|R| + 1`; the denominator is shared by every state.
    fn key(&self, i: usize) -> usize {
        self.remaining[i] * (self.doms.len() + 1) + self.total[i]
    }

    fn digits(&self, i: usize) -> Vec<Value> {
        (0..self.doms.len()).map(|p| self.digit(i, p) as Value).collect()
    }

    fn run(mut self) -> RegulationCoverSet {
        while let Some((_, omega)) = self.queue.pop_first() {
            let digits = self.digits(omega);
            let mut ext = Vec::new();
            if !self.covered(&digits, &ext) {
                let mut level = self.doms.len().saturating_sub(1);
                loop {
                    ext = self.candidates(&digits, level);
                    if level == 0 || self.covered(&digits, &ext) {
                        break;
                    }
                    level -= 1;
                }
            }
            for entries in ext {
                self.chosen.insert(entries.clone());
                self.members.push(PartialRegulatorState::new(self.change.component, entries));
            }
            self.retire(omega, &digits);
        }
        RegulationCoverSet {
            change: self.change,
            members: self.members,
        }
    }

    fn covered(&self, digits: &[Value], ext: &[Vec<Option<Value>>]) -> bool {
        let r = digits.len();
        let mut any = false;
        let mut witnessed = 0usize;
        let mut visit = |entries: &[Option<Value>]| {
            any = true;
            for (p, e) in entries.iter().enumerate() {
                if e.is_some() {
                    witnessed |= 1 << p;
                }
            }
        };
        let contains = |entries: &[Option<Value>]| entries.iter().zip(digits).all(|(e, &k)| e.is_none_or(|e| e == k));
        if r < usize::BITS as usize - 1 && (1usize << r) <= self.chosen.len() {
            for mask in 0..1usize << r {
                let entries = with_wildcards(digits, mask);
                if self.chosen.contains(&entries) {
                    visit(&entries);
                }
            }
        } else {
            for entries in self.chosen.iter().filter(|e| contains(e)) {
                visit(entries);
            }
        }
        for entries in ext.iter().filter(|e| contains(e)) {
            visit(entries);
        }
        any && witnessed.count_ones() as usize == r
    }

    /// Enabling-safe, not removed partial states containing `digits` with
    /// exactly `level` wildcards, ordered lexicographically with the
    /// wildcard after every value.
    fn candidates(&mut self, digits: &[Value], level: usize) -> Vec<Vec<Option<Value>>> {
        let r = digits.len();
        let mut out = Vec::new();
        for mask in 0..1usize << r {
            if mask.count_ones() as usize != level {
                continue;
            }
            let entries = with_wildcards(digits, mask);
            if self.removed.contains(&entries) || !self.is_safe(&entries) {
                continue;
            }
            out.push(entries);
        }
        out.sort_by_key(|e| e.iter().map(|x| x.map_or(usize::MAX, usize::from)).collect::<Vec<_>>());
        out
    }

    fn is_safe(&mut self, entries: &[Option<Value>]) -> bool {
        if let Some(&s) = self.safe.get(entries) {
            return s;
        }
        let p = PartialRegulatorState::new(self.change.component, entries.to_vec());
        let s = p
            .members(self.prn)
            .iter()
            .all(|w| self.enabling[self.prn.encode_regulator_values(w.target, &w.values)]);
        self.safe.insert(entries.to_vec(), s);
        s
    }

    fn retire(&mut self, omega: usize, digits: &[Value]) {
        let n = self.n();
        self.processed[omega] = true;
        for p in 0..self.doms.len() {
            let key = p * n + self.base(omega, p);
            if !self.safe1[key] || self.removed1[key] {
                continue;
            }
            self.removed1[key] = true;
            for k in 0..self.doms[p] {
                let other = self.base(omega, p) + k * self.strides[p];
                if other == omega || self.processed[other] {
                    continue;
                }
                self.queue.remove(&(self.key(other), other));
                self.remaining[other] -= 1;
                self.queue.insert((self.key(other), other));
            }
        }
        for mask in 0..1usize << digits.len() {
            self.removed.insert(with_wildcards(digits, mask));
        }
    }
}

fn with_wildcards(digits: &[Value], mask: usize) -> Vec<Option<Value>> {
    digits
        .iter()
        .enumerate()
        .map(|(p, &k)| if mask >> p & 1 == 1 { None } else { Some(k) })
        .collect()
}
