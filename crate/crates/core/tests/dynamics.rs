mod common;

use common::{admissible, arb_boolean_prn, enables, state_from, walk};
use prnred_core::{
    apply_transition, enabled_in_state, enumerate_minimal_traces, initial_lattice, objective_valid, reachable,
    trace_realisable, trace_realisable_concrete, ConcreteParametrisationSet, Dprn, Goal, Objective, Prn, SearchMode,
    SearchOptions, State, Trace, Transition, Verdict,
};
use proptest::prelude::*;

fn goal_of(prn: &Prn, pick: usize, value: u8) -> Goal {
    let v = prn.components().nth(pick % prn.component_count()).unwrap();
    Goal {
        component: v,
        value: value % (prn.max(v) + 1),
    }
}

fn realisable(prn: &Prn, base: &[prnred_core::Parametrisation], steps: &[Transition]) -> bool {
    base.iter().any(|p| steps.iter().all(|t| enables(prn, p, t)))
}

fn is_subsequence(short: &[Transition], long: &[Transition]) -> bool {
    let mut it = long.iter();
    short.iter().all(|t| it.any(|u| u == t))
}

/// Every realisable trace of length at most `max_len` ending in the goal,
/// found by plain depth-first enumeration.
fn goal_traces(prn: &Prn, base: &[prnred_core::Parametrisation], x: &State, goal: Goal, max_len: usize) -> Vec<Vec<Transition>> {
    fn go(
        prn: &Prn,
        base: &[prnred_core::Parametrisation],
        all: &[Transition],
        s: &State,
        goal: Goal,
        left: usize,
        path: &mut Vec<Transition>,
        out: &mut Vec<Vec<Transition>>,
    ) {
        if s[goal.component] == goal.value {
            out.push(path.clone());
        }
        if left == 0 {
            return;
        }
        for t in all.iter().filter(|t| enabled_in_state(prn, t, s)) {
            path.push(t.clone());
            if realisable(prn, base, path) {
                let next = apply_transition(prn, s, t).unwrap();
                go(prn, base, all, &next, goal, left - 1, path, out);
            }
            path.pop();
        }
    }
    let all = prn.all_transitions();
    let mut out = Vec::new();
    go(prn, base, &all, x, goal, max_len, &mut Vec::new(), &mut out);
    out
}

fn brute_minimal(prn: &Prn, base: &[prnred_core::Parametrisation], x: &State, goal: Goal, max_len: usize) -> Vec<Vec<Transition>> {
    let traces = goal_traces(prn, base, x, goal, max_len);
    let mut minimal: Vec<Vec<Transition>> = traces
        .iter()
        .filter(|t| !traces.iter().any(|r| r.len() < t.len() && is_subsequence(r, t)))
        .cloned()
        .collect();
    minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    minimal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn minimal_traces_match_brute_force(
        prn in arb_boolean_prn(3, 2),
        picks in proptest::collection::vec(0u8..2, 3),
        g in 0usize..3,
        gv in 0u8..2,
    ) {
        let x = state_from(&prn, &picks);
        let goal = goal_of(&prn, g, gv);
        let base = admissible(&prn);
        let set = ConcreteParametrisationSet::from_members(base.clone());
        let found: Vec<Vec<Transition>> = enumerate_minimal_traces(&prn, &set, &x, goal, 5)
            .into_iter()
            .map(|t| t.steps)
            .collect();
        let mut sorted = found.clone();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        prop_assert_eq!(&found, &sorted, "not in length order");
        prop_assert_eq!(found, brute_minimal(&prn, &base, &x, goal, 5));
    }

    #[test]
    fn concrete_realisability_implies_lattice_realisability(
        prn in arb_boolean_prn(3, 2),
        picks in proptest::collection::vec(0u8..2, 3),
        steps in proptest::collection::vec(0usize..50, 0..6),
    ) {
        let x = state_from(&prn, &picks);
        let trace = Trace::new(x.clone(), walk(&prn, &x, &steps));
        let base = ConcreteParametrisationSet::from_members(admissible(&prn));
        let conc = trace_realisable_concrete(&prn, &trace, &base).unwrap();
        let abs = trace_realisable(&prn, &trace, &initial_lattice(&prn)).unwrap();
        prop_assert_eq!(conc, realisable(&prn, &base.members(&prn), &trace.steps));
        prop_assert!(!conc || abs);
    }

    #[test]
    fn minimal_traces_stay_minimal_for_each_parametrisation(
        prn in arb_boolean_prn(3, 2),
        picks in proptest::collection::vec(0u8..2, 3),
        g in 0usize..3,
        gv in 0u8..2,
    ) {
        let x = state_from(&prn, &picks);
        let goal = goal_of(&prn, g, gv);
        let base = admissible(&prn);
        let set = ConcreteParametrisationSet::from_members(base.clone());
        for trace in enumerate_minimal_traces(&prn, &set, &x, goal, 5) {
            for p in base.iter().filter(|p| trace.steps.iter().all(|t| enables(&prn, p, t))) {
                let single = ConcreteParametrisationSet::from_members([p.clone()]);
                prop_assert!(trace_realisable_concrete(&prn, &trace, &single).unwrap());
                let shorter = goal_traces(&prn, std::slice::from_ref(p), &x, goal, trace.len().saturating_sub(1));
                prop_assert!(
                    !shorter.iter().any(|r| r.len() < trace.len() && is_subsequence(r, &trace.steps)),
                    "a shorter trace of a single parametrisation embeds"
                );
            }
        }
    }

    #[test]
    fn exact_reachability_implies_approximate(
        prn in arb_boolean_prn(4, 3),
        picks in proptest::collection::vec(0u8..2, 4),
        g in 0usize..4,
        gv in 0u8..2,
    ) {
        let x = state_from(&prn, &picks);
        let goal = goal_of(&prn, g, gv);
        let dprn = Dprn::unrestricted(prn.clone());
        let lat = initial_lattice(&prn);
        let exact = reachable(&dprn, &x, goal, &lat, SearchOptions::default());
        let approx = reachable(&dprn, &x, goal, &lat, SearchOptions { mode: SearchMode::Approximate, ..Default::default() });
        if exact.verdict == Verdict::Reached {
            prop_assert_eq!(approx.verdict, Verdict::Reached);
        }
        if let Some(w) = &exact.witness {
            prop_assert!(trace_realisable(&prn, w, &lat).unwrap());
            prop_assert!(goal.holds(&w.end(&prn).unwrap()));
        }
    }

    #[test]
    fn concrete_goal_traces_are_found_by_the_lattice_search(
        prn in arb_boolean_prn(3, 2),
        picks in proptest::collection::vec(0u8..2, 3),
        g in 0usize..3,
        gv in 0u8..2,
    ) {
        let x = state_from(&prn, &picks);
        let goal = goal_of(&prn, g, gv);
        let set = ConcreteParametrisationSet::from_members(admissible(&prn));
        let dprn = Dprn::unrestricted(prn.clone());
        let out = reachable(&dprn, &x, goal, &initial_lattice(&prn), SearchOptions::default());
        if !enumerate_minimal_traces(&prn, &set, &x, goal, 6).is_empty() {
            prop_assert_eq!(out.verdict, Verdict::Reached);
        }
    }

}

proptest! {
    // Exhaustive exact searches grow with the number of reachable bounds.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subsumption_keeps_the_verdict(
        prn in arb_boolean_prn(3, 3),
        picks in proptest::collection::vec(0u8..2, 3),
        g in 0usize..3,
        gv in 0u8..2,
    ) {
        let x = state_from(&prn, &picks);
        let goal = goal_of(&prn, g, gv);
        let dprn = Dprn::unrestricted(prn.clone());
        let lat = initial_lattice(&prn);
        let plain = reachable(&dprn, &x, goal, &lat, SearchOptions { exhaustive: true, ..Default::default() });
        let merged = reachable(&dprn, &x, goal, &lat, SearchOptions { exhaustive: true, subsumption: true, ..Default::default() });
        prop_assert_eq!(plain.verdict, merged.verdict);
        prop_assert!(merged.configurations <= plain.configurations);
        prop_assert_eq!(plain.states, merged.states);
    }

    #[test]
    fn explored_configurations_are_bounded(
        prn in arb_boolean_prn(3, 3),
        picks in proptest::collection::vec(0u8..2, 3),
    ) {
        let x = state_from(&prn, &picks);
        let goal = Goal { component: prn.components().next().unwrap(), value: 2 };
        let dprn = Dprn::unrestricted(prn.clone());
        let lat = initial_lattice(&prn);
        let out = reachable(&dprn, &x, goal, &lat, SearchOptions::default());
        prop_assert_eq!(out.verdict, Verdict::Unreached);
        // Each configuration pairs a state with bounds L <= U inside the starting bounds.
        let per_state: u128 = lat
            .lower
            .0
            .iter()
            .zip(&lat.upper.0)
            .map(|(&l, &u)| {
                let w = u128::from(u - l) + 1;
                w * (w + 1) / 2
            })
            .product();
        let states: usize = prn.components().map(|v| prn.max(v) as usize + 1).product();
        prop_assert!(out.states <= states);
        prop_assert!((out.configurations as u128) <= out.states as u128 * per_state);
    }

}

proptest! {
    #[test]
    fn objectives_without_change_are_valid(prn in arb_boolean_prn(3, 2), picks in proptest::collection::vec(0u8..2, 3)) {
        let x = state_from(&prn, &picks);
        let dprn = Dprn::unrestricted(prn.clone());
        let v = prn.components().next().unwrap();
        let obj = Objective::new(v, 1, 1);
        prop_assert!(objective_valid(&dprn, &obj, &x, &initial_lattice(&prn), SearchOptions::default()).unwrap());
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let prn = common::build(&[1, 1, 1], &[vec![(1, 0), (2, 0)], vec![(0, 0)], vec![(1, 0)]]);
    let dprn = Dprn::unrestricted(prn.clone());
    let x = prn.zero_state();
    let goal = Goal { component: prn.components().next().unwrap(), value: 2 };
    let opts = SearchOptions { budget: Some(1), ..Default::default() };
    assert_eq!(reachable(&dprn, &x, goal, &initial_lattice(&prn), opts).verdict, Verdict::Unknown);
    let obj = Objective::new(goal.component, 1, 0);
    let lat = initial_lattice(&prn);
    let r = objective_valid(&dprn, &obj, &x, &lat, SearchOptions { budget: Some(1), ..Default::default() });
    assert!(r.is_err(), "{r:?}");
}
