use alloc::string::String;
use core::fmt;

use crate::network::{ComponentId, Value};

/// A single failed invariant of a network declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyName,
    DuplicateComponent(String),
    ZeroMaximum(String),
    UnknownComponent {
        name: String,
        regulator: String,
        target: String,
    },
    DuplicateInfluence {
        regulator: String,
        target: String,
    },
    ConflictingMonotonicity {
        regulator: String,
        target: String,
    },
    TooManyRegulatorStates(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyName => f.write_str("component with an empty name"),
            Violation::DuplicateComponent(n) => write!(f, "duplicate component `{n}`"),
            Violation::ZeroMaximum(n) => write!(f, "component `{n}` must have a maximum value >= 1"),
            Violation::UnknownComponent {
                name,
                regulator,
                target,
            } => write!(f, "unknown component `{name}` in influence {regulator} -> {target}"),
            Violation::DuplicateInfluence { regulator, target } => {
                write!(f, "duplicate influence {regulator} -> {target}")
            }
            Violation::ConflictingMonotonicity { regulator, target } => write!(
                f,
                "conflicting monotonicity on influence {regulator} -> {target}"
            ),
            Violation::TooManyRegulatorStates(n) => {
                write!(f, "component `{n}` has too many regulator states")
            }
        }
    }
}

/// Errors raised by operations on an already validated network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreError {
    DimensionMismatch { expected: usize, found: usize },
    ValueOutOfDomain { component: ComponentId, value: Value },
    MalformedTransition,
    /// A transition was applied in a state where it is not enabled.
    NotEnabled,
    /// A trace step is not enabled at its position.
    InvalidTrace { step: usize },
    /// Explicit parametrisation enumeration would exceed the given cap.
    CapExceeded { cap: u128 },
    /// A search ran out of its configuration budget.
    BudgetExhausted { explored: usize },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            CoreError::ValueOutOfDomain { component, value } => {
                write!(f, "value {value} outside the domain of component {component}")
            }
            CoreError::MalformedTransition => f.write_str("malformed transition"),
            CoreError::NotEnabled => f.write_str("transition is not enabled in this state"),
            CoreError::InvalidTrace { step } => {
                write!(f, "trace step {step} is not enabled at its position")
            }
            CoreError::CapExceeded { cap } => write!(
                f,
                "explicit parametrisation space exceeds the cap of {cap}; use the lattice semantics instead"
            ),
            CoreError::BudgetExhausted { explored } => {
                write!(f, "search budget exhausted after {explored} configurations")
            }
        }
    }
}

impl core::error::Error for CoreError {}
