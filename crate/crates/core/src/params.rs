//! Parametrisations, the constraint-satisfying parametrisation space and the
//! two parametrisation set semantics: an explicit one that filters concrete
//! parametrisations, and a lattice one that keeps only a lower and an upper
//! bound.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::CoreError;
use crate::network::{ComponentId, Constraints, Prn, Transition, Value};

/// One value per parameter `(v, ω)`, laid out as described on [`Prn`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Parametrisation(pub Vec<Value>);

impl Parametrisation {
    pub fn constant(prn: &Prn, value: impl Fn(ComponentId) -> Value) -> Parametrisation {
        let mut values = alloc::vec![0; prn.parameter_count()];
        for v in prn.components() {
            for slot in &mut values[prn.parameter_range(v)] {
                *slot = value(v);
            }
        }
        Parametrisation(values)
    }

    pub fn get(&self, prn: &Prn, v: ComponentId, omega_index: usize) -> Value {
        self.0[prn.parameter_index(v, omega_index)]
    }

    pub fn table(&self, prn: &Prn, v: ComponentId) -> &[Value] {
        &self.0[prn.parameter_range(v)]
    }

    /// Parametrisation order: componentwise `<=`.
    pub fn le(&self, other: &Parametrisation) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// Value a parameter must take for a single parametrisation to enable `t`:
/// at or beyond `to(t)` in the direction of the change.
pub fn value_enables(value: Value, t: &Transition) -> bool {
    if t.is_increasing() {
        value >= t.to
    } else {
        value <= t.to
    }
}

/// Whether the single parametrisation `p` enables `t`.
pub fn parametrisation_enables(prn: &Prn, p: &Parametrisation, t: &Transition) -> bool {
    value_enables(p.get(prn, t.component, t.regulator_state.index(prn)), t)
}

/// Checks the sign and observability constraints of the influences into `v`
/// against the parameter table of `v`.
pub fn table_satisfies_constraints(prn: &Prn, v: ComponentId, table: &[Value]) -> bool {
    let regs = prn.regulators(v);
    let strides = prn.regulator_strides(v);
    for (pos, &u) in regs.iter().enumerate() {
        let c = prn.constraint(u, v).unwrap_or_default();
        if c.is_empty() {
            continue;
        }
        let stride = strides[pos];
        let dom = usize::from(prn.max(u)) + 1;
        let mut observed = false;
        for hi in 0..table.len() {
            if (hi / stride) % dom == 0 {
                continue;
            }
            let (upper, lower) = (table[hi], table[hi - stride]);
            if c.positive && upper < lower {
                return false;
            }
            if c.negative && upper > lower {
                return false;
            }
            observed |= upper != lower;
        }
        if c.observable && !observed {
            return false;
        }
    }
    true
}

/// Membership in the constraint-satisfying parametrisation space.
pub fn satisfies_constraints(p: &Parametrisation, prn: &Prn) -> bool {
    p.0.len() == prn.parameter_count()
        && prn.components().all(|v| {
            let table = p.table(prn, v);
            table.iter().all(|&k| k <= prn.max(v)) && table_satisfies_constraints(prn, v, table)
        })
}

/// Convex parametrisation set `{P | lower <= P <= upper}`.
///
/// Emptiness (`lower` not below `upper`) is a status, not an error. Bounds
/// produced by [`initial_lattice`] and [`restrict_lattice`] are kept closed
/// under the sign constraints, see [`monotone_closure`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParametrisationLattice {
    pub lower: Parametrisation,
    pub upper: Parametrisation,
}

impl ParametrisationLattice {
    pub fn is_empty(&self) -> bool {
        !self.lower.le(&self.upper)
    }

    pub fn contains(&self, p: &Parametrisation) -> bool {
        self.lower.le(p) && p.le(&self.upper)
    }

    /// Set inclusion, with empty lattices included in everything.
    pub fn is_subset_of(&self, other: &ParametrisationLattice) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        other.lower.le(&self.lower) && self.upper.le(&other.upper)
    }

    /// Number of integer points in the box, saturating.
    pub fn volume(&self) -> u128 {
        if self.is_empty() {
            return 0;
        }
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .fold(1u128, |acc, (l, u)| acc.saturating_mul(u128::from(u - l) + 1))
    }
}

impl fmt::Display for ParametrisationLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for v in &self.lower.0 {
            write!(f, "{v}")?;
        }
        f.write_str(", ")?;
        for v in &self.upper.0 {
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// The full box `0 <= P <= m`, closed under the sign constraints.
/// Observability is existential and is not representable by bounds.
pub fn initial_lattice(prn: &Prn) -> ParametrisationLattice {
    let lat = ParametrisationLattice {
        lower: Parametrisation::constant(prn, |_| 0),
        upper: Parametrisation::constant(prn, |v| prn.max(v)),
    };
    monotone_closure(&lat, prn)
}

/// Tightens the bounds until the lower bound and the upper bound are both
/// monotone along every sign-constrained influence: for `(u, v, +)` the
/// lower bound is pushed upward along increasing `u` and the upper bound
/// downward along decreasing `u`, dually for `(u, v, -)`.
pub fn monotone_closure(lat: &ParametrisationLattice, prn: &Prn) -> ParametrisationLattice {
    let mut out = lat.clone();
    close_in_place(prn, &mut out);
    out
}

struct SignedChain {
    base: usize,
    len: usize,
    stride: usize,
    dom: usize,
    positive: bool,
}

fn signed_chains(prn: &Prn) -> impl Iterator<Item = SignedChain> + '_ {
    prn.components().flat_map(move |v| {
        let strides = prn.regulator_strides(v);
        prn.regulators(v)
            .iter()
            .enumerate()
            .filter_map(move |(pos, &u)| {
                let c: Constraints = prn.constraint(u, v).unwrap_or_default();
                if !(c.positive || c.negative) {
                    return None;
                }
                Some(SignedChain {
                    base: prn.parameter_range(v).start,
                    len: prn.regulator_state_count(v),
                    stride: strides[pos],
                    dom: usize::from(prn.max(u)) + 1,
                    positive: c.positive,
                })
            })
    })
}

fn close_in_place(prn: &Prn, lat: &mut ParametrisationLattice) {
    let chains: Vec<SignedChain> = signed_chains(prn).collect();
    if chains.is_empty() {
        return;
    }
    let (lower, upper) = (&mut lat.lower.0, &mut lat.upper.0);
    loop {
        let mut changed = false;
        for ch in &chains {
            let is_head = |i: usize| (i / ch.stride) % ch.dom == 0;
            // Ascending sweep: raise the lower bound (+) / lower the upper bound (-).
            for i in 0..ch.len {
                if is_head(i) {
                    continue;
                }
                let (hi, lo) = (ch.base + i, ch.base + i - ch.stride);
                if ch.positive {
                    if lower[hi] < lower[lo] {
                        lower[hi] = lower[lo];
                        changed = true;
                    }
                } else if upper[hi] > upper[lo] {
                    upper[hi] = upper[lo];
                    changed = true;
                }
            }
            // Descending sweep: lower the upper bound (+) / raise the lower bound (-).
            for i in (0..ch.len).rev() {
                if is_head(i) {
                    continue;
                }
                let (hi, lo) = (ch.base + i, ch.base + i - ch.stride);
                if ch.positive {
                    if upper[lo] > upper[hi] {
                        upper[lo] = upper[hi];
                        changed = true;
                    }
                } else if lower[lo] < lower[hi] {
                    lower[lo] = lower[hi];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Whether some parametrisation of the lattice enables `t`. Only the
/// relevant bound is consulted.
pub fn enabled_by_lattice(prn: &Prn, t: &Transition, lat: &ParametrisationLattice) -> bool {
    if lat.is_empty() {
        return false;
    }
    enabled_by_bounds(prn, lat, t.component, t.regulator_state.index(prn), t.is_increasing(), t.to)
}

pub(crate) fn enabled_by_bounds(
    prn: &Prn,
    lat: &ParametrisationLattice,
    v: ComponentId,
    omega_index: usize,
    increasing: bool,
    to: Value,
) -> bool {
    let idx = prn.parameter_index(v, omega_index);
    if increasing {
        lat.upper.0[idx] >= to
    } else {
        lat.lower.0[idx] <= to
    }
}

/// Keeps the parametrisations of `lat` that enable `t`; the result may be empty.
pub fn restrict_lattice(prn: &Prn, lat: &ParametrisationLattice, t: &Transition) -> ParametrisationLattice {
    let mut out = lat.clone();
    restrict_in_place(prn, &mut out, t.component, t.regulator_state.index(prn), t.is_increasing(), t.to);
    out
}

pub(crate) fn restrict_in_place(
    prn: &Prn,
    lat: &mut ParametrisationLattice,
    v: ComponentId,
    omega_index: usize,
    increasing: bool,
    to: Value,
) {
    let idx = prn.parameter_index(v, omega_index);
    let changed = if increasing {
        let slot = &mut lat.lower.0[idx];
        let raised = *slot < to;
        *slot = (*slot).max(to);
        raised
    } else {
        let slot = &mut lat.upper.0[idx];
        let lowered = *slot > to;
        *slot = (*slot).min(to);
        lowered
    };
    if changed {
        close_in_place(prn, lat);
    }
}

/// Lattice semantics of a transition set, folded from [`initial_lattice`].
pub fn psi_abstract<'a>(prn: &Prn, transitions: impl IntoIterator<Item = &'a Transition>) -> ParametrisationLattice {
    psi_abstract_from(prn, &initial_lattice(prn), transitions)
}

/// Lattice semantics of a transition set, folded from an arbitrary start.
pub fn psi_abstract_from<'a>(
    prn: &Prn,
    start: &ParametrisationLattice,
    transitions: impl IntoIterator<Item = &'a Transition>,
) -> ParametrisationLattice {
    let mut lat = start.clone();
    for t in transitions {
        restrict_in_place(prn, &mut lat, t.component, t.regulator_state.index(prn), t.is_increasing(), t.to);
    }
    lat
}

/// Parameter tables admitted for one component, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Factor {
    width: usize,
    tables: Vec<Value>,
}

impl Factor {
    fn count(&self) -> usize {
        self.tables.len() / self.width
    }

    fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.tables.chunks_exact(self.width)
    }

    fn retain(&self, mut keep: impl FnMut(&[Value]) -> bool) -> Factor {
        let mut tables = Vec::new();
        for row in self.rows() {
            if keep(row) {
                tables.extend_from_slice(row);
            }
        }
        Factor {
            width: self.width,
            tables,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Arbitrary finite set, sorted and deduplicated.
    Explicit(Vec<Parametrisation>),
    /// Cartesian product of per-component tables.
    Product(Vec<Arc<Factor>>),
}

/// An explicitly enumerated parametrisation set.
///
/// Constraint-satisfying spaces are products of per-component tables since
/// every influence constraint only mentions the parameters of its target;
/// such sets are kept factored so that their members never need to be
/// materialised. Arbitrary sets (for instance a few named parametrisations)
/// are stored as a plain list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteParametrisationSet {
    repr: Repr,
}

impl ConcreteParametrisationSet {
    pub fn from_members(members: impl IntoIterator<Item = Parametrisation>) -> Self {
        let mut members: Vec<_> = members.into_iter().collect();
        members.sort();
        members.dedup();
        ConcreteParametrisationSet {
            repr: Repr::Explicit(members),
        }
    }

    /// Number of members, saturating.
    pub fn len(&self) -> u128 {
        match &self.repr {
            Repr::Explicit(m) => m.len() as u128,
            Repr::Product(fs) => fs
                .iter()
                .fold(1u128, |acc, f| acc.saturating_mul(f.count() as u128)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Explicit(m) => m.is_empty(),
            Repr::Product(fs) => fs.iter().any(|f| f.count() == 0),
        }
    }

    pub fn contains(&self, prn: &Prn, p: &Parametrisation) -> bool {
        match &self.repr {
            Repr::Explicit(m) => m.binary_search(p).is_ok(),
            Repr::Product(fs) => prn
                .components()
                .all(|v| fs[v.0].rows().any(|row| row == p.table(prn, v))),
        }
    }

    /// Members in lexicographic order. Only sensible for small sets.
    pub fn members(&self, prn: &Prn) -> Vec<Parametrisation> {
        match &self.repr {
            Repr::Explicit(m) => m.clone(),
            Repr::Product(fs) => {
                if self.is_empty() {
                    return Vec::new();
                }
                let mut out = Vec::new();
                let mut cursor = alloc::vec![0usize; fs.len()];
                loop {
                    let mut values = Vec::with_capacity(prn.parameter_count());
                    for (f, &row) in fs.iter().zip(&cursor) {
                        values.extend_from_slice(&f.tables[row * f.width..(row + 1) * f.width]);
                    }
                    out.push(Parametrisation(values));
                    let mut k = fs.len();
                    loop {
                        if k == 0 {
                            return out;
                        }
                        k -= 1;
                        cursor[k] += 1;
                        if cursor[k] < fs[k].count() {
                            break;
                        }
                        cursor[k] = 0;
                    }
                }
            }
        }
    }

    /// Whether some member enables `t`.
    pub fn enables(&self, prn: &Prn, t: &Transition) -> bool {
        let omega = t.regulator_state.index(prn);
        match &self.repr {
            Repr::Explicit(m) => m
                .iter()
                .any(|p| value_enables(p.get(prn, t.component, omega), t)),
            Repr::Product(fs) => {
                !self.is_empty() && fs[t.component.0].rows().any(|row| value_enables(row[omega], t))
            }
        }
    }

    /// Members enabling `t`.
    pub fn restrict(&self, prn: &Prn, t: &Transition) -> Self {
        let omega = t.regulator_state.index(prn);
        let repr = match &self.repr {
            Repr::Explicit(m) => Repr::Explicit(
                m.iter()
                    .filter(|p| value_enables(p.get(prn, t.component, omega), t))
                    .cloned()
                    .collect(),
            ),
            Repr::Product(fs) => {
                let mut fs = fs.clone();
                let v = t.component.0;
                fs[v] = Arc::new(fs[v].retain(|row| value_enables(row[omega], t)));
                Repr::Product(fs)
            }
        };
        ConcreteParametrisationSet { repr }
    }

    /// Smallest lattice containing every member, closed under the sign
    /// constraints. `None` for the empty set.
    pub fn hull(&self, prn: &Prn) -> Option<ParametrisationLattice> {
        if self.is_empty() {
            return None;
        }
        let n = prn.parameter_count();
        let mut lower = alloc::vec![Value::MAX; n];
        let mut upper = alloc::vec![0; n];
        let mut absorb = |offset: usize, row: &[Value]| {
            for (k, &val) in row.iter().enumerate() {
                lower[offset + k] = lower[offset + k].min(val);
                upper[offset + k] = upper[offset + k].max(val);
            }
        };
        match &self.repr {
            Repr::Explicit(m) => {
                for p in m {
                    absorb(0, &p.0);
                }
            }
            Repr::Product(fs) => {
                for v in prn.components() {
                    for row in fs[v.0].rows() {
                        absorb(prn.parameter_range(v).start, row);
                    }
                }
            }
        }
        let lat = ParametrisationLattice {
            lower: Parametrisation(lower),
            upper: Parametrisation(upper),
        };
        Some(monotone_closure(&lat, prn))
    }
}

/// The constraint-satisfying parametrisation space, enumerated component by
/// component. `cap` bounds the raw table space scanned for any single
/// component, `(m_v + 1)^|Ω_v|`.
pub fn enumerate_parametrisations(prn: &Prn, cap: u128) -> Result<ConcreteParametrisationSet, CoreError> {
    let mut factors = Vec::with_capacity(prn.component_count());
    for v in prn.components() {
        let width = prn.regulator_state_count(v);
        let dom = u128::from(prn.max(v)) + 1;
        let raw = (0..width).try_fold(1u128, |acc, _| acc.checked_mul(dom));
        match raw {
            Some(r) if r <= cap => {}
            _ => return Err(CoreError::CapExceeded { cap }),
        }
        let mut tables = Vec::new();
        let mut row = alloc::vec![0 as Value; width];
        loop {
            if table_satisfies_constraints(prn, v, &row) {
                tables.extend_from_slice(&row);
            }
            // Odometer with the first parameter most significant.
            let mut k = width;
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                if row[k] < prn.max(v) {
                    row[k] += 1;
                    break false;
                }
                row[k] = 0;
            };
            if done {
                break;
            }
        }
        factors.push(Arc::new(Factor { width, tables }));
    }
    Ok(ConcreteParametrisationSet {
        repr: Repr::Product(factors),
    })
}

/// Explicit semantics: the members of `base` enabling every transition of `transitions`.
pub fn psi_concrete<'a>(
    prn: &Prn,
    base: &ConcreteParametrisationSet,
    transitions: impl IntoIterator<Item = &'a Transition>,
) -> ConcreteParametrisationSet {
    let mut set = base.clone();
    for t in transitions {
        set = set.restrict(prn, t);
    }
    set
}
