//! Machine-readable reports. Field order is fixed so that identical inputs
//! give byte-identical JSON.

use std::fmt::Write as _;

use prnred_core::{
    enabled_by_lattice, spec_count, ComponentId, Dprn, Objective, ParametrisationLattice, PartialTransition, Prn,
    ReachOutcome, ReductionResult, RegulationCoverSet, Rule, SearchMode, State, Trace, Value, Verdict,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::render;

/// A limit: a value or an infinity, written as a number or as `"-inf"` / `"+inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Finite(Value),
    NegInf,
    PosInf,
}

impl Limit {
    pub fn activation(l: Option<Value>) -> Limit {
        l.map_or(Limit::NegInf, Limit::Finite)
    }

    pub fn inhibition(l: Option<Value>) -> Limit {
        l.map_or(Limit::PosInf, Limit::Finite)
    }
}

impl Serialize for Limit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Limit::Finite(v) => s.serialize_u8(*v),
            Limit::NegInf => s.serialize_str("-inf"),
            Limit::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Limit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(Value),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Limit::Finite(v)),
            Raw::Text(t) if t == "-inf" => Ok(Limit::NegInf),
            Raw::Text(t) if t == "+inf" => Ok(Limit::PosInf),
            Raw::Text(t) => Err(D::Error::custom(format!("invalid limit `{t}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveRef {
    pub component: String,
    pub from: Value,
    pub to: Value,
}

impl ObjectiveRef {
    fn new(prn: &Prn, o: &Objective) -> Self {
        ObjectiveRef {
            component: prn.name(o.component).to_string(),
            from: o.from,
            to: o.to,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveEntry {
    pub component: String,
    pub from: Value,
    pub to: Value,
    /// `seed`, `regulator` or `bridge`.
    pub rule: String,
    pub parent: Option<ObjectiveRef>,
    pub valid_transitions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialTransitionEntry {
    pub component: String,
    pub from: Value,
    pub to: Value,
    pub regulators: Vec<String>,
    /// Regulator values in regulator order; `null` is a wildcard.
    pub partial: Vec<Option<Value>>,
}

impl PartialTransitionEntry {
    fn new(prn: &Prn, pt: &PartialTransition) -> Self {
        let v = pt.change.component;
        PartialTransitionEntry {
            component: prn.name(v).to_string(),
            from: pt.change.from,
            to: pt.change.to,
            regulators: regulator_names(prn, v),
            partial: pt.partial.entries.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentLimit {
    pub component: String,
    pub activation: Limit,
    pub inhibition: Limit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateLimit {
    pub component: String,
    pub regulator_state: Vec<Value>,
    pub activation: Limit,
    pub inhibition: Limit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    pub per_component: Vec<ComponentLimit>,
    pub per_state: Vec<StateLimit>,
}

impl Limits {
    pub fn of(dprn: &Dprn) -> Limits {
        let prn = dprn.prn();
        let (act, inh) = dprn.component_limits();
        let per_component = prn
            .components()
            .map(|v| ComponentLimit {
                component: prn.name(v).to_string(),
                activation: Limit::activation(act[v.index()]),
                inhibition: Limit::inhibition(inh[v.index()]),
            })
            .collect();
        let mut per_state = Vec::new();
        for v in prn.components() {
            for (i, omega) in prn.regulator_states(v).into_iter().enumerate() {
                per_state.push(StateLimit {
                    component: prn.name(v).to_string(),
                    regulator_state: omega.values,
                    activation: Limit::activation(dprn.activation_limit(v, i)),
                    inhibition: Limit::inhibition(dprn.inhibition_limit(v, i)),
                });
            }
        }
        Limits {
            per_component,
            per_state,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counts {
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assigned {
    pub component: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionStats {
    pub parametrisations: String,
    pub cover_sets: usize,
    pub validity_queries: usize,
    pub validity_unknown: usize,
    pub explored_configurations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionReport {
    pub components: Vec<String>,
    pub initial: Vec<Value>,
    pub goal: Assigned,
    pub mode: String,
    pub objectives: Vec<ObjectiveEntry>,
    pub valid_transitions: Vec<PartialTransitionEntry>,
    pub limits: Limits,
    /// Transitions passing the limit filter and enabled by the starting lattice.
    pub enabled_transitions: Counts,
    pub stats: ReductionStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub fn mode_name(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::Exact => "exact",
        SearchMode::Approximate => "approx",
    }
}

fn regulator_names(prn: &Prn, v: ComponentId) -> Vec<String> {
    prn.regulators(v).iter().map(|&u| prn.name(u).to_string()).collect()
}

fn enabled_count(dprn: &Dprn, lattice: &ParametrisationLattice) -> usize {
    dprn.prn()
        .all_transitions()
        .iter()
        .filter(|t| dprn.allows(t) && enabled_by_lattice(dprn.prn(), t, lattice))
        .count()
}

pub struct ReductionInput<'a> {
    pub input: &'a Dprn,
    pub lattice0: &'a ParametrisationLattice,
    pub initial: &'a State,
    pub goal: prnred_core::Goal,
    pub mode: SearchMode,
    pub parametrisations: String,
    pub cover_sets: usize,
    pub validity_queries: usize,
    pub explored_configurations: usize,
}

impl ReductionReport {
    pub fn new(inp: &ReductionInput<'_>, result: &ReductionResult) -> ReductionReport {
        let prn = inp.input.prn();
        let objectives = result
            .closure
            .objectives
            .members
            .iter()
            .zip(&result.closure.valid)
            .map(|(o, (_, pts))| {
                let (rule, parent) = result.closure.objectives.provenance[o];
                ObjectiveEntry {
                    component: prn.name(o.component).to_string(),
                    from: o.from,
                    to: o.to,
                    rule: match rule {
                        Rule::Seed => "seed",
                        Rule::Regulator => "regulator",
                        Rule::Bridge => "bridge",
                    }
                    .to_string(),
                    parent: parent.map(|p| ObjectiveRef::new(prn, &p)),
                    valid_transitions: pts.len(),
                }
            })
            .collect();
        ReductionReport {
            components: prn.components().map(|v| prn.name(v).to_string()).collect(),
            initial: inp.initial.values().to_vec(),
            goal: Assigned {
                component: prn.name(inp.goal.component).to_string(),
                value: inp.goal.value,
            },
            mode: mode_name(inp.mode).to_string(),
            objectives,
            valid_transitions: result
                .transitions
                .iter()
                .map(|pt| PartialTransitionEntry::new(prn, pt))
                .collect(),
            limits: Limits::of(&result.dprn),
            enabled_transitions: Counts {
                before: enabled_count(inp.input, inp.lattice0),
                after: enabled_count(&result.dprn, inp.lattice0),
            },
            stats: ReductionStats {
                parametrisations: inp.parametrisations.clone(),
                cover_sets: inp.cover_sets,
                validity_queries: inp.validity_queries,
                validity_unknown: result.unknown_validity,
                explored_configurations: inp.explored_configurations,
            },
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self, prn: &Prn, result: &ReductionResult) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "goal {}={} from {} ({} mode)",
            self.goal.component,
            self.goal.value,
            render::state(prn, &self.initial),
            self.mode
        )
        .unwrap();
        writeln!(out, "objectives ({}):", self.objectives.len()).unwrap();
        for (o, e) in result.closure.objectives.members.iter().zip(&self.objectives) {
            let origin = match &e.parent {
                Some(p) => format!("{} from {} {}~>{}", e.rule, p.component, p.from, p.to),
                None => e.rule.clone(),
            };
            writeln!(out, "  {:<12} [{origin}]", render::objective(prn, o)).unwrap();
        }
        writeln!(out, "valid partial transitions ({}):", result.transitions.len()).unwrap();
        for pt in &result.transitions {
            writeln!(out, "  {}", render::partial_transition(prn, pt)).unwrap();
        }
        let (act, inh) = result.dprn.component_limits();
        let line = |f: &dyn Fn(usize) -> String| {
            prn.components()
                .map(|v| format!("{}={}", prn.name(v), f(v.index())))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "activation limits: {}", line(&|i| render::activation(act[i]))).unwrap();
        writeln!(out, "inhibition limits: {}", line(&|i| render::inhibition(inh[i]))).unwrap();
        writeln!(out, "per regulator state:").unwrap();
        for v in prn.components() {
            for (i, omega) in prn.regulator_states(v).into_iter().enumerate() {
                let values: Vec<Option<Value>> = omega.values.iter().map(|&k| Some(k)).collect();
                writeln!(
                    out,
                    "  {} {}  activation {}  inhibition {}",
                    prn.name(v),
                    render::regulator_values(prn, v, &values),
                    render::activation(result.dprn.activation_limit(v, i)),
                    render::inhibition(result.dprn.inhibition_limit(v, i)),
                )
                .unwrap();
            }
        }
        writeln!(
            out,
            "enabled transitions: {} before, {} after",
            self.enabled_transitions.before, self.enabled_transitions.after
        )
        .unwrap();
        if self.stats.validity_unknown > 0 {
            writeln!(
                out,
                "warning: {} validity queries exhausted the budget and were kept",
                self.stats.validity_unknown
            )
            .unwrap();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverMember {
    /// Regulator values in regulator order; `null` is a wildcard.
    pub partial: Vec<Option<Value>>,
    pub specified: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverReport {
    pub component: String,
    pub from: Value,
    pub to: Value,
    pub regulators: Vec<String>,
    pub enabling: Vec<Vec<Value>>,
    pub members: Vec<CoverMember>,
    pub spec_count: usize,
    pub concrete_spec_count: usize,
}

impl CoverReport {
    pub fn new(prn: &Prn, cs: &RegulationCoverSet, concrete: &RegulationCoverSet) -> CoverReport {
        let v = cs.change.component;
        CoverReport {
            component: prn.name(v).to_string(),
            from: cs.change.from,
            to: cs.change.to,
            regulators: regulator_names(prn, v),
            enabling: concrete
                .members
                .iter()
                .map(|m| m.entries.iter().map(|e| e.expect("concrete members are wildcard-free")).collect())
                .collect(),
            members: cs
                .members
                .iter()
                .map(|m| CoverMember {
                    partial: m.entries.clone(),
                    specified: m.specified(),
                })
                .collect(),
            spec_count: spec_count(cs),
            concrete_spec_count: spec_count(concrete),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self, prn: &Prn, cs: &RegulationCoverSet) -> String {
        let mut out = String::new();
        writeln!(out, "cover set of {} {}->{} ({} members):", self.component, self.from, self.to, self.members.len())
            .unwrap();
        for m in &cs.members {
            writeln!(out, "  {}", render::partial(prn, m)).unwrap();
        }
        writeln!(
            out,
            "specifications: {} (concrete cover: {})",
            self.spec_count, self.concrete_spec_count
        )
        .unwrap();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachSide {
    pub verdict: String,
    pub states: usize,
    pub configurations: usize,
    pub witness: Option<Vec<String>>,
}

impl ReachSide {
    pub fn new(prn: &Prn, out: &ReachOutcome) -> ReachSide {
        ReachSide {
            verdict: verdict_name(out.verdict).to_string(),
            states: out.states,
            configurations: out.configurations,
            witness: out
                .witness
                .as_ref()
                .map(|w| w.steps.iter().map(|t| render::transition(prn, t)).collect()),
        }
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Reached => "reached",
        Verdict::Unreached => "unreached",
        Verdict::Unknown => "unknown",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachReport {
    pub goal: Assigned,
    pub mode: String,
    pub unreduced: ReachSide,
    pub reduced: Option<ReachSide>,
}

impl ReachReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let side = |out: &mut String, name: &str, s: &ReachSide| {
            writeln!(
                out,
                "{name}: {} ({} states, {} configurations explored)",
                s.verdict, s.states, s.configurations
            )
            .unwrap();
            if let Some(w) = &s.witness {
                let w = if w.is_empty() { "(empty)".to_string() } else { w.join(", ") };
                writeln!(out, "  witness: {w}").unwrap();
            }
        };
        side(&mut out, "unreduced", &self.unreduced);
        if let Some(r) = &self.reduced {
            side(&mut out, "reduced", r);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleReport {
    pub goal: Assigned,
    pub max_len: usize,
    pub traces: Vec<Vec<String>>,
}

impl OracleReport {
    pub fn new(prn: &Prn, goal: prnred_core::Goal, max_len: usize, traces: &[Trace]) -> OracleReport {
        OracleReport {
            goal: Assigned {
                component: prn.name(goal.component).to_string(),
                value: goal.value,
            },
            max_len,
            traces: traces
                .iter()
                .map(|t| t.steps.iter().map(|s| render::transition(prn, s)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} minimal traces to {}={} up to length {}:",
            self.traces.len(),
            self.goal.component,
            self.goal.value,
            self.max_len
        )
        .unwrap();
        for (i, t) in self.traces.iter().enumerate() {
            let body = if t.is_empty() { "(empty)".to_string() } else { t.join(", ") };
            writeln!(out, "  {}. [{}] {body}", i + 1, t.len()).unwrap();
        }
        out
    }
}
