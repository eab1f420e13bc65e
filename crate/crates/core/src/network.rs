//! Influence graphs, influence constraints and the static structure of a
//! parametric regulatory network: components, states, regulator states and
//! unit-step local transitions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{CoreError, Violation};

/// Discrete value of a component. Domains are `0..=max`.
pub type Value = u8;

/// Upper bound on `|Ω_v|` accepted by validation.
pub const MAX_REGULATOR_STATES: usize = 1 << 20;

/// Dense index of a component in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub usize);

impl ComponentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Labels attached to one influence: `+`, `-` and `o`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraints {
    pub positive: bool,
    pub negative: bool,
    pub observable: bool,
}

impl Constraints {
    pub const NONE: Constraints = Constraints {
        positive: false,
        negative: false,
        observable: false,
    };

    pub fn is_empty(&self) -> bool {
        !(self.positive || self.negative || self.observable)
    }

    /// Parses the label syntax of model files (`""`, `+`, `-`, `o`, `+o`, `-o`, ...).
    pub fn parse(label: &str) -> Option<Constraints> {
        let mut c = Constraints::NONE;
        for ch in label.chars() {
            let slot = match ch {
                '+' => &mut c.positive,
                '-' => &mut c.negative,
                'o' => &mut c.observable,
                _ => return None,
            };
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(c)
    }
}

impl fmt::Display for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str("+")?;
        }
        if self.negative {
            f.write_str("-")?;
        }
        if self.observable {
            f.write_str("o")?;
        }
        Ok(())
    }
}

/// Declaration of a component before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: String,
    pub max: Value,
}

/// Declaration of an influence before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceDecl {
    pub regulator: String,
    pub target: String,
    pub constraints: Constraints,
}

/// Unvalidated network description, as read from a model file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetworkDecl {
    pub components: Vec<ComponentDecl>,
    pub influences: Vec<InfluenceDecl>,
}

impl NetworkDecl {
    pub fn component(&mut self, name: &str, max: Value) -> &mut Self {
        self.components.push(ComponentDecl {
            name: name.into(),
            max,
        });
        self
    }

    pub fn influence(&mut self, regulator: &str, target: &str, label: &str) -> &mut Self {
        let constraints = Constraints::parse(label).expect("invalid constraint label");
        self.influences.push(InfluenceDecl {
            regulator: regulator.into(),
            target: target.into(),
            constraints,
        });
        self
    }
}

/// Outcome of [`validate_model`]. Empty means the declaration is a valid PRN.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a network declaration.
pub fn validate_model(decl: &NetworkDecl) -> ValidationReport {
    let mut violations = Vec::new();
    let mut names = BTreeMap::new();
    for c in &decl.components {
        if c.name.is_empty() {
            violations.push(Violation::EmptyName);
        }
        if names.insert(c.name.as_str(), c.max).is_some() {
            violations.push(Violation::DuplicateComponent(c.name.clone()));
        }
        if c.max == 0 {
            violations.push(Violation::ZeroMaximum(c.name.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    let mut in_degree: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for inf in &decl.influences {
        for end in [&inf.regulator, &inf.target] {
            if !names.contains_key(end.as_str()) {
                violations.push(Violation::UnknownComponent {
                    name: end.clone(),
                    regulator: inf.regulator.clone(),
                    target: inf.target.clone(),
                });
            }
        }
        if !seen.insert((inf.regulator.as_str(), inf.target.as_str())) {
            violations.push(Violation::DuplicateInfluence {
                regulator: inf.regulator.clone(),
                target: inf.target.clone(),
            });
        }
        if inf.constraints.positive && inf.constraints.negative {
            violations.push(Violation::ConflictingMonotonicity {
                regulator: inf.regulator.clone(),
                target: inf.target.clone(),
            });
        }
        in_degree
            .entry(inf.target.as_str())
            .or_default()
            .push(inf.regulator.as_str());
    }
    for (target, regs) in in_degree {
        let mut size: usize = 1;
        for r in regs {
            let dom = names.get(r).map_or(1, |m| usize::from(*m) + 1);
            size = size.saturating_mul(dom);
        }
        if size > MAX_REGULATOR_STATES {
            violations.push(Violation::TooManyRegulatorStates(target.into()));
        }
    }
    ValidationReport { violations }
}

/// A validated parametric regulatory network.
///
/// Components are ordered by declaration. Regulators of each component are
/// ordered by component index; regulator states are enumerated
/// lexicographically with the first regulator most significant, and the
/// parameter vector concatenates the per-component tables in component order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prn {
    names: Vec<String>,
    max: Vec<Value>,
    regulators: Vec<Vec<ComponentId>>,
    influences: BTreeMap<(ComponentId, ComponentId), Constraints>,
    /// Offset of each component's parameter table in the parameter vector;
    /// one extra trailing entry holds `|Ω|`.
    offsets: Vec<usize>,
}

impl Prn {
    pub fn new(decl: &NetworkDecl) -> Result<Prn, ValidationReport> {
        let report = validate_model(decl);
        if !report.is_ok() {
            return Err(report);
        }
        let names: Vec<String> = decl.components.iter().map(|c| c.name.clone()).collect();
        let max: Vec<Value> = decl.components.iter().map(|c| c.max).collect();
        let lookup = |n: &str| ComponentId(names.iter().position(|x| x == n).unwrap());
        let mut influences = BTreeMap::new();
        let mut regulators = alloc::vec![Vec::new(); names.len()];
        for inf in &decl.influences {
            let u = lookup(&inf.regulator);
            let v = lookup(&inf.target);
            influences.insert((u, v), inf.constraints);
            regulators[v.0].push(u);
        }
        for regs in &mut regulators {
            regs.sort();
        }
        let mut offsets = Vec::with_capacity(names.len() + 1);
        let mut acc = 0;
        for regs in &regulators {
            offsets.push(acc);
            acc += regs.iter().map(|u| usize::from(max[u.0]) + 1).product::<usize>();
        }
        offsets.push(acc);
        Ok(Prn {
            names,
            max,
            regulators,
            influences,
            offsets,
        })
    }

    /// Rebuilds the declaration this network was constructed from
    /// (influences ordered by target, then regulator).
    pub fn to_decl(&self) -> NetworkDecl {
        let components = self
            .components()
            .map(|v| ComponentDecl {
                name: self.name(v).into(),
                max: self.max(v),
            })
            .collect();
        let mut influences = Vec::new();
        for v in self.components() {
            for &u in self.regulators(v) {
                influences.push(InfluenceDecl {
                    regulator: self.name(u).into(),
                    target: self.name(v).into(),
                    constraints: self.constraint(u, v).unwrap_or_default(),
                });
            }
        }
        NetworkDecl {
            components,
            influences,
        }
    }

    pub fn component_count(&self) -> usize {
        self.names.len()
    }

    pub fn components(&self) -> impl Iterator<Item = ComponentId> + Clone {
        (0..self.names.len()).map(ComponentId)
    }

    pub fn name(&self, v: ComponentId) -> &str {
        &self.names[v.0]
    }

    pub fn component(&self, name: &str) -> Option<ComponentId> {
        self.names.iter().position(|n| n == name).map(ComponentId)
    }

    pub fn max(&self, v: ComponentId) -> Value {
        self.max[v.0]
    }

    pub fn max_vector(&self) -> &[Value] {
        &self.max
    }

    pub fn regulators(&self, v: ComponentId) -> &[ComponentId] {
        &self.regulators[v.0]
    }

    /// Position of `u` in the regulator list of `v`.
    pub fn regulator_position(&self, v: ComponentId, u: ComponentId) -> Option<usize> {
        self.regulators[v.0].iter().position(|&r| r == u)
    }

    pub fn influences(&self) -> impl Iterator<Item = (ComponentId, ComponentId, Constraints)> + '_ {
        self.influences.iter().map(|(&(u, v), &c)| (u, v, c))
    }

    pub fn influence_count(&self) -> usize {
        self.influences.len()
    }

    pub fn constraint(&self, u: ComponentId, v: ComponentId) -> Option<Constraints> {
        self.influences.get(&(u, v)).copied()
    }

    /// `|Ω_v|`.
    pub fn regulator_state_count(&self, v: ComponentId) -> usize {
        self.offsets[v.0 + 1] - self.offsets[v.0]
    }

    /// `|Ω|`, the length of a parametrisation vector.
    pub fn parameter_count(&self) -> usize {
        self.offsets[self.names.len()]
    }

    /// Position of parameter `(v, ω)` in the parameter vector.
    pub fn parameter_index(&self, v: ComponentId, omega_index: usize) -> usize {
        debug_assert!(omega_index < self.regulator_state_count(v));
        self.offsets[v.0] + omega_index
    }

    /// Range of the parameter vector holding the table of `v`.
    pub fn parameter_range(&self, v: ComponentId) -> core::ops::Range<usize> {
        self.offsets[v.0]..self.offsets[v.0 + 1]
    }

    /// Mixed-radix weight of each regulator position of `v`.
    pub fn regulator_strides(&self, v: ComponentId) -> Vec<usize> {
        let regs = self.regulators(v);
        let mut strides = alloc::vec![1; regs.len()];
        for k in (0..regs.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (usize::from(self.max(regs[k + 1])) + 1);
        }
        strides
    }

    /// Index of `values` in the lexicographic enumeration of `Ω_v`.
    pub fn encode_regulator_values(&self, v: ComponentId, values: &[Value]) -> usize {
        let regs = self.regulators(v);
        debug_assert_eq!(regs.len(), values.len());
        regs.iter().zip(values).fold(0, |acc, (&u, &k)| {
            acc * (usize::from(self.max(u)) + 1) + usize::from(k)
        })
    }

    pub fn decode_regulator_values(&self, v: ComponentId, mut index: usize) -> Vec<Value> {
        let regs = self.regulators(v);
        let mut values = alloc::vec![0; regs.len()];
        for (k, &u) in regs.iter().enumerate().rev() {
            let dom = usize::from(self.max(u)) + 1;
            values[k] = (index % dom) as Value;
            index /= dom;
        }
        values
    }

    /// Index of `project(x, v)` without materialising the regulator state.
    pub fn regulator_index_in(&self, x: &[Value], v: ComponentId) -> usize {
        self.regulators(v).iter().fold(0, |acc, &u| {
            acc * (usize::from(self.max(u)) + 1) + usize::from(x[u.0])
        })
    }

    /// All regulator states of `v` in lexicographic order.
    pub fn regulator_states(&self, v: ComponentId) -> Vec<RegulatorState> {
        (0..self.regulator_state_count(v))
            .map(|i| RegulatorState::from_index(self, v, i))
            .collect()
    }

    /// Reads the regulators of `v` from the global state `x`.
    pub fn project(&self, x: &State, v: ComponentId) -> RegulatorState {
        RegulatorState {
            target: v,
            values: self.regulators(v).iter().map(|u| x[*u]).collect(),
        }
    }

    pub fn state(&self, values: &[Value]) -> Result<State, CoreError> {
        let state = State(values.to_vec());
        self.check_state(&state)?;
        Ok(state)
    }

    pub fn zero_state(&self) -> State {
        State(alloc::vec![0; self.component_count()])
    }

    pub fn check_state(&self, x: &State) -> Result<(), CoreError> {
        if x.0.len() != self.component_count() {
            return Err(CoreError::DimensionMismatch {
                expected: self.component_count(),
                found: x.0.len(),
            });
        }
        for v in self.components() {
            if x[v] > self.max(v) {
                return Err(CoreError::ValueOutOfDomain {
                    component: v,
                    value: x[v],
                });
            }
        }
        Ok(())
    }

    pub fn check_transition(&self, t: &Transition) -> Result<(), CoreError> {
        let v = t.component;
        if v.0 >= self.component_count()
            || t.regulator_state.target != v
            || t.regulator_state.values.len() != self.regulators(v).len()
        {
            return Err(CoreError::MalformedTransition);
        }
        let in_domain = t.from <= self.max(v) && t.to <= self.max(v);
        if !in_domain || t.from.abs_diff(t.to) != 1 {
            return Err(CoreError::MalformedTransition);
        }
        for (&u, &k) in self.regulators(v).iter().zip(&t.regulator_state.values) {
            if k > self.max(u) {
                return Err(CoreError::MalformedTransition);
            }
        }
        Ok(())
    }

    /// `T(G)`: every unit value change of every component under every
    /// regulator state, grouped by component, then regulator state, then
    /// source value, increasing before decreasing.
    pub fn all_transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for v in self.components() {
            for omega in self.regulator_states(v) {
                for from in 0..=self.max(v) {
                    if from < self.max(v) {
                        out.push(Transition::new(v, from, from + 1, omega.clone()));
                    }
                    if from > 0 {
                        out.push(Transition::new(v, from, from - 1, omega.clone()));
                    }
                }
            }
        }
        out
    }
}

/// A global state: one value per component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub Vec<Value>);

impl State {
    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn with(&self, v: ComponentId, value: Value) -> State {
        let mut next = self.clone();
        next.0[v.0] = value;
        next
    }
}

impl core::ops::Index<ComponentId> for State {
    type Output = Value;
    fn index(&self, v: ComponentId) -> &Value {
        &self.0[v.0]
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for v in &self.0 {
            write!(f, "{v}")?;
        }
        f.write_str(">")
    }
}

/// Values of the regulators of `target`, in regulator order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegulatorState {
    pub target: ComponentId,
    pub values: Vec<Value>,
}

impl RegulatorState {
    pub fn new(target: ComponentId, values: Vec<Value>) -> Self {
        RegulatorState { target, values }
    }

    pub fn from_index(prn: &Prn, v: ComponentId, index: usize) -> Self {
        RegulatorState {
            target: v,
            values: prn.decode_regulator_values(v, index),
        }
    }

    pub fn index(&self, prn: &Prn) -> usize {
        prn.encode_regulator_values(self.target, &self.values)
    }
}

impl fmt::Display for RegulatorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for v in &self.values {
            write!(f, "{v}")?;
        }
        f.write_str(">")
    }
}

/// A local transition `(v, from -> to, ω)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub component: ComponentId,
    pub from: Value,
    pub to: Value,
    pub regulator_state: RegulatorState,
}

impl Transition {
    pub fn new(component: ComponentId, from: Value, to: Value, regulator_state: RegulatorState) -> Self {
        debug_assert_eq!(regulator_state.target, component);
        Transition {
            component,
            from,
            to,
            regulator_state,
        }
    }

    /// `+1` for an increase, `-1` for a decrease.
    pub fn sign(&self) -> i8 {
        if self.to > self.from {
            1
        } else {
            -1
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.to > self.from
    }

    pub fn reversed(&self) -> Transition {
        Transition {
            component: self.component,
            from: self.to,
            to: self.from,
            regulator_state: self.regulator_state.clone(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_increasing() { '+' } else { '-' };
        write!(
            f,
            "{}{}{}->{},{}",
            self.component, sign, self.from, self.to, self.regulator_state
        )
    }
}

/// `t` is enabled in `x` iff `x` holds the source value and the regulator state.
pub fn enabled_in_state(prn: &Prn, t: &Transition, x: &State) -> bool {
    let v = t.component;
    x[v] == t.from
        && prn
            .regulators(v)
            .iter()
            .zip(&t.regulator_state.values)
            .all(|(&u, &k)| x[u] == k)
}

/// `x · t`.
pub fn apply_transition(prn: &Prn, x: &State, t: &Transition) -> Result<State, CoreError> {
    if !enabled_in_state(prn, t, x) {
        return Err(CoreError::NotEnabled);
    }
    Ok(x.with(t.component, t.to))
}
