//! Seeded random campaign checking that reduction keeps every minimal trace
//! and never changes the reachability verdict.

use std::fmt::Write as _;

use prnred_core::{
    enumerate_parametrisations, preservation_check, reachable, Dprn, Goal, NetworkDecl, Prn, SearchOptions, State,
    Value, Verdict,
};
use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{print_text, ModelFile};
use crate::report::verdict_name;

const NAMES: [&str; 4] = ["a", "b", "c", "d"];
const LABELS: [&str; 6] = ["", "+", "-", "o", "+o", "-o"];

#[derive(Clone, Copy, Debug)]
pub struct CampaignConfig {
    pub seed: u64,
    pub count: usize,
    pub max_len: usize,
    pub max_components: usize,
    pub max_regulators: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            count: 100,
            max_len: 8,
            max_components: 4,
            max_regulators: 3,
        }
    }
}

/// A random Boolean network with 2 to `max_components` components, each with
/// at most `max_regulators` distinct regulators (self-loops allowed).
pub fn random_prn(rng: &mut impl Rng, max_components: usize, max_regulators: usize) -> Prn {
    let n = rng.random_range(2..=max_components.clamp(2, NAMES.len()));
    let mut decl = NetworkDecl::default();
    for name in &NAMES[..n] {
        decl.component(name, 1);
    }
    for target in 0..n {
        let k = rng.random_range(0..=max_regulators.min(n));
        let mut regs = index::sample(rng, n, k).into_vec();
        regs.sort_unstable();
        for u in regs {
            let label = *LABELS.choose(rng).expect("labels are non-empty");
            decl.influence(NAMES[u], NAMES[target], label);
        }
    }
    Prn::new(&decl).expect("generated networks are well formed")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub model: String,
    pub initial: Vec<Value>,
    pub goal: String,
    pub parametrisations: String,
    pub minimal_traces: usize,
    pub objectives: usize,
    pub partial_transitions: usize,
    pub violations: usize,
    pub reached_before: String,
    pub reached_after: String,
    pub states_before: usize,
    pub states_after: usize,
}

impl Instance {
    pub fn discrepant(&self) -> bool {
        self.reached_before != self.reached_after
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignReport {
    pub seed: u64,
    pub count: usize,
    pub max_len: usize,
    pub empty_parametrisation_sets: usize,
    pub violations: usize,
    pub discrepancies: usize,
    pub unknown: usize,
    pub instances: Vec<Instance>,
}

/// Builds and checks one instance from its own seed.
pub fn run_instance(index: usize, seed: u64, cfg: &CampaignConfig) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prn = random_prn(&mut rng, cfg.max_components, cfg.max_regulators);
    let values: Vec<Value> = prn.components().map(|_| rng.random_range(0..=1)).collect();
    let x = State(values.clone());
    // The goal value always differs from the initial one.
    let component = prn.components().nth(rng.random_range(0..prn.component_count())).expect("in range");
    let goal = Goal {
        component,
        value: 1 - values[component.index()],
    };
    let base = enumerate_parametrisations(&prn, u128::MAX).expect("boolean spaces are small");
    let exact = SearchOptions::default();
    let report = preservation_check(&prn, &base, &x, goal, cfg.max_len, exact);
    let mut inst = Instance {
        index,
        seed,
        model: print_text(&ModelFile::from_prn(&prn)),
        initial: values,
        goal: format!("{}={}", prn.name(goal.component), goal.value),
        parametrisations: base.len().to_string(),
        minimal_traces: report.traces.len(),
        objectives: 0,
        partial_transitions: 0,
        violations: report.violations.len(),
        reached_before: verdict_name(Verdict::Unreached).to_string(),
        reached_after: verdict_name(Verdict::Unreached).to_string(),
        states_before: 0,
        states_after: 0,
    };
    if let (Some(reduction), Some(lattice0)) = (&report.reduction, base.hull(&prn)) {
        let input = Dprn::unrestricted(prn.clone());
        let before = reachable(&input, &x, goal, &lattice0, exact);
        let after = reachable(&reduction.dprn, &x, goal, &lattice0, exact);
        inst.objectives = reduction.closure.objectives.len();
        inst.partial_transitions = reduction.transitions.len();
        inst.reached_before = verdict_name(before.verdict).to_string();
        inst.reached_after = verdict_name(after.verdict).to_string();
        inst.states_before = before.states;
        inst.states_after = after.states;
    }
    inst
}

/// Instance `i` uses seed `cfg.seed + i`, so any instance can be replayed alone.
pub fn run_campaign(cfg: &CampaignConfig) -> CampaignReport {
    let instances: Vec<Instance> = (0..cfg.count)
        .map(|i| run_instance(i, cfg.seed.wrapping_add(i as u64), cfg))
        .collect();
    CampaignReport {
        seed: cfg.seed,
        count: cfg.count,
        max_len: cfg.max_len,
        empty_parametrisation_sets: instances.iter().filter(|i| i.parametrisations == "0").count(),
        violations: instances.iter().map(|i| i.violations).sum(),
        discrepancies: instances.iter().filter(|i| i.discrepant()).count(),
        unknown: instances
            .iter()
            .filter(|i| i.reached_before == "unknown" || i.reached_after == "unknown")
            .count(),
        instances,
    }
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "campaign seed {} count {} max-len {}",
            self.seed, self.count, self.max_len
        )
        .unwrap();
        let reached = self.instances.iter().filter(|i| i.reached_before == "reached").count();
        let traces: usize = self.instances.iter().map(|i| i.minimal_traces).sum();
        writeln!(
            out,
            "{reached} goals reachable, {traces} minimal traces, {} empty parametrisation sets",
            self.empty_parametrisation_sets
        )
        .unwrap();
        writeln!(
            out,
            "preservation violations: {}  verdict discrepancies: {}  unknown: {}",
            self.violations, self.discrepancies, self.unknown
        )
        .unwrap();
        for i in self.instances.iter().filter(|i| i.violations > 0 || i.discrepant()) {
            writeln!(
                out,
                "instance {} (seed {}): {} violations, before {} after {}",
                i.index, i.seed, i.violations, i.reached_before, i.reached_after
            )
            .unwrap();
            for line in i.model.lines() {
                writeln!(out, "    {line}").unwrap();
            }
        }
        out
    }
}
