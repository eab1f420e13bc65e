#![allow(dead_code)]

use prnred_core::{
    apply_transition, enabled_in_state, satisfies_constraints, NetworkDecl, Parametrisation, Prn, State, Transition,
    Value,
};
use proptest::prelude::*;

pub const LABELS: [&str; 6] = ["", "+", "-", "o", "+o", "-o"];

pub fn name(i: usize) -> String {
    format!("v{i}")
}

/// Regulators are `(source, label)` pairs; repeated sources keep the first.
pub fn build(maxes: &[Value], regs: &[Vec<(usize, usize)>]) -> Prn {
    let mut decl = NetworkDecl::default();
    for (i, &m) in maxes.iter().enumerate() {
        decl.component(&name(i), m);
    }
    for (target, rs) in regs.iter().enumerate() {
        let mut seen = Vec::new();
        for &(u, label) in rs {
            let u = u % maxes.len();
            if !seen.contains(&u) {
                seen.push(u);
                decl.influence(&name(u), &name(target), LABELS[label % LABELS.len()]);
            }
        }
    }
    Prn::new(&decl).expect("well formed")
}

/// Networks with 2..=`max_components` components of maxima 1..=`max_value`
/// and at most `max_regulators` regulators each.
pub fn arb_prn(max_components: usize, max_value: Value, max_regulators: usize) -> impl Strategy<Value = Prn> {
    (2..=max_components)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec(1..=max_value, n),
                proptest::collection::vec(
                    proptest::collection::vec((0..n, 0..LABELS.len()), 0..=max_regulators),
                    n,
                ),
            )
        })
        .prop_map(|(maxes, regs)| build(&maxes, &regs))
}

pub fn arb_boolean_prn(max_components: usize, max_regulators: usize) -> impl Strategy<Value = Prn> {
    arb_prn(max_components, 1, max_regulators)
}

/// Every vector of parameter values within the component domains.
pub fn raw_parametrisations(prn: &Prn) -> Vec<Parametrisation> {
    let mut domains = Vec::new();
    for v in prn.components() {
        for _ in 0..prn.regulator_state_count(v) {
            domains.push(prn.max(v));
        }
    }
    let mut out = vec![Vec::new()];
    for m in domains {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Value>| {
                (0..=m).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Parametrisation).collect()
}

/// The constraint-satisfying parametrisations, by filtering the raw space.
pub fn admissible(prn: &Prn) -> Vec<Parametrisation> {
    raw_parametrisations(prn)
        .into_iter()
        .filter(|p| satisfies_constraints(p, prn))
        .collect()
}

/// Direct reading of set-enabling: the parameter lies at or beyond the target value.
pub fn enables(prn: &Prn, p: &Parametrisation, t: &Transition) -> bool {
    let k = p.0[prn.parameter_index(t.component, t.regulator_state.index(prn))];
    if t.to > t.from {
        k >= t.to
    } else {
        k <= t.to
    }
}

pub fn state_from(prn: &Prn, picks: &[u8]) -> State {
    let values: Vec<Value> = prn
        .components()
        .zip(picks.iter().cycle())
        .map(|(v, &k)| k % (prn.max(v) + 1))
        .collect();
    prn.state(&values).unwrap()
}

/// A walk from `x` following the state-enabled transition picked by each index.
pub fn walk(prn: &Prn, x: &State, picks: &[usize]) -> Vec<Transition> {
    let all = prn.all_transitions();
    let mut s = x.clone();
    let mut steps = Vec::new();
    for &i in picks {
        let enabled: Vec<&Transition> = all.iter().filter(|t| enabled_in_state(prn, t, &s)).collect();
        if enabled.is_empty() {
            break;
        }
        let t = enabled[i % enabled.len()].clone();
        s = apply_transition(prn, &s, &t).unwrap();
        steps.push(t);
    }
    steps
}
