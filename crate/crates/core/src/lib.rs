//! Goal-oriented model reduction for parametric regulatory networks.
//!
//! A network is an influence graph whose edges carry monotonicity and
//! observability constraints; its dynamics is the asynchronous unit-step
//! semantics under any admissible parametrisation. Given an initial state and
//! a goal value, [`reduction::reduce`] computes activation and inhibition
//! limits that forbid value changes no minimal goal-reaching trace needs.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cover;
pub mod dprn;
pub mod dynamics;
pub mod error;
pub mod network;
pub mod params;
pub mod reduction;

pub use cover::{
    compute_cover_set, concrete_cover_set, spec_count, verify_cover_set, weight, PartialRegulatorState,
    RegulationCoverSet, ValueChange, Weight,
};
pub use dprn::{dprn_enabled, Dprn};
pub use dynamics::{
    enumerate_minimal_traces, is_minimal, objective_valid, reachable, trace_realisable, trace_realisable_concrete,
    Goal, ReachOutcome, SearchMode, SearchOptions, Trace, Verdict,
};
pub use error::{CoreError, Violation};
pub use network::{
    apply_transition, enabled_in_state, validate_model, ComponentId, Constraints, NetworkDecl, Prn, RegulatorState,
    State, Transition, ValidationReport, Value,
};
pub use params::{
    enabled_by_lattice, enumerate_parametrisations, initial_lattice, monotone_closure, psi_abstract, psi_concrete,
    restrict_lattice, satisfies_constraints, ConcreteParametrisationSet, Parametrisation, ParametrisationLattice,
};
pub use reduction::{
    compute_objective_closure, objective_transition_set, preservation_check, reduce, valid_objective_transition_set,
    CoverCache, Objective, ObjectiveClosure, ObjectiveSet, PartialTransition, PreservationReport, PreservationViolation, ReductionContext, ReductionResult,
    Rule,
};
