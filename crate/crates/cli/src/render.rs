//! Human-readable rendering with component names.

use prnred_core::{ComponentId, Objective, PartialRegulatorState, PartialTransition, Prn, Trace, Transition, Value};

/// `-inf` for a missing activation limit.
pub fn activation(limit: Option<Value>) -> String {
    limit.map_or_else(|| "-inf".to_string(), |l| l.to_string())
}

/// `+inf` for a missing inhibition limit.
pub fn inhibition(limit: Option<Value>) -> String {
    limit.map_or_else(|| "+inf".to_string(), |l| l.to_string())
}

/// `⟨b=1 c=* d=0⟩`, regulators in index order.
pub fn regulator_values(prn: &Prn, v: ComponentId, values: &[Option<Value>]) -> String {
    let parts: Vec<String> = prn
        .regulators(v)
        .iter()
        .zip(values)
        .map(|(&u, k)| match k {
            Some(k) => format!("{}={k}", prn.name(u)),
            None => format!("{}=*", prn.name(u)),
        })
        .collect();
    format!("⟨{}⟩", parts.join(" "))
}

pub fn partial(prn: &Prn, p: &PartialRegulatorState) -> String {
    regulator_values(prn, p.target, &p.entries)
}

pub fn transition(prn: &Prn, t: &Transition) -> String {
    let values: Vec<Option<Value>> = t.regulator_state.values.iter().map(|&k| Some(k)).collect();
    format!(
        "{} {}->{} {}",
        prn.name(t.component),
        t.from,
        t.to,
        regulator_values(prn, t.component, &values)
    )
}

pub fn partial_transition(prn: &Prn, pt: &PartialTransition) -> String {
    format!(
        "{} {}->{} {}",
        prn.name(pt.change.component),
        pt.change.from,
        pt.change.to,
        partial(prn, &pt.partial)
    )
}

pub fn objective(prn: &Prn, o: &Objective) -> String {
    format!("{} {}~>{}", prn.name(o.component), o.from, o.to)
}

pub fn trace(prn: &Prn, t: &Trace) -> String {
    if t.steps.is_empty() {
        return "(empty)".to_string();
    }
    t.steps.iter().map(|s| transition(prn, s)).collect::<Vec<_>>().join(", ")
}

pub fn state(prn: &Prn, values: &[Value]) -> String {
    prn.components()
        .map(|v| format!("{}={}", prn.name(v), values[v.index()]))
        .collect::<Vec<_>>()
        .join(",")
}
