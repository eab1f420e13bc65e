//! Directed networks: a network plus per-regulator-state activation and
//! inhibition limits restricting which value changes may fire.

use alloc::vec::Vec;

use crate::error::CoreError;
use crate::network::{enabled_in_state, ComponentId, Prn, State, Transition, Value};
use crate::params::{enabled_by_lattice, ParametrisationLattice};

/// A network with limit vectors indexed like the parameter vector.
///
/// An activation limit of `None` stands for `-inf` and an inhibition limit of
/// `None` for `+inf`; both forbid every change in their direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dprn {
    prn: Prn,
    activation: Vec<Option<Value>>,
    inhibition: Vec<Option<Value>>,
}

impl Dprn {
    /// Limits at the extremes (`m_v` and `0`): every transition is allowed.
    pub fn unrestricted(prn: Prn) -> Dprn {
        let n = prn.parameter_count();
        let mut activation = alloc::vec![None; n];
        let inhibition = alloc::vec![Some(0); n];
        for v in prn.components() {
            for slot in &mut activation[prn.parameter_range(v)] {
                *slot = Some(prn.max(v));
            }
        }
        Dprn {
            prn,
            activation,
            inhibition,
        }
    }

    pub fn with_limits(
        prn: Prn,
        activation: Vec<Option<Value>>,
        inhibition: Vec<Option<Value>>,
    ) -> Result<Dprn, CoreError> {
        for len in [activation.len(), inhibition.len()] {
            if len != prn.parameter_count() {
                return Err(CoreError::DimensionMismatch {
                    expected: prn.parameter_count(),
                    found: len,
                });
            }
        }
        Ok(Dprn {
            prn,
            activation,
            inhibition,
        })
    }

    pub fn prn(&self) -> &Prn {
        &self.prn
    }

    pub fn activation_limits(&self) -> &[Option<Value>] {
        &self.activation
    }

    pub fn inhibition_limits(&self) -> &[Option<Value>] {
        &self.inhibition
    }

    pub fn activation_limit(&self, v: ComponentId, omega_index: usize) -> Option<Value> {
        self.activation[self.prn.parameter_index(v, omega_index)]
    }

    pub fn inhibition_limit(&self, v: ComponentId, omega_index: usize) -> Option<Value> {
        self.inhibition[self.prn.parameter_index(v, omega_index)]
    }

    /// The limit filter alone: `from < l^A[ω]` for increases, `from > l^I[ω]`
    /// for decreases.
    pub fn allows(&self, t: &Transition) -> bool {
        self.allows_at(t.component, t.regulator_state.index(&self.prn), t.from, t.is_increasing())
    }

    pub(crate) fn allows_at(&self, v: ComponentId, omega_index: usize, from: Value, increasing: bool) -> bool {
        if increasing {
            self.activation_limit(v, omega_index).is_some_and(|l| from < l)
        } else {
            self.inhibition_limit(v, omega_index).is_some_and(|l| from > l)
        }
    }

    /// Per-component summary: the largest activation limit and the smallest
    /// inhibition limit over the regulator states of each component.
    pub fn component_limits(&self) -> (Vec<Option<Value>>, Vec<Option<Value>>) {
        let mut act = Vec::new();
        let mut inh = Vec::new();
        for v in self.prn.components() {
            let range = self.prn.parameter_range(v);
            act.push(self.activation[range.clone()].iter().copied().max().flatten());
            let finite = self.inhibition[range].iter().flatten().copied().min();
            inh.push(finite);
        }
        (act, inh)
    }

    /// Number of transitions of the network that pass the limit filter.
    pub fn allowed_transition_count(&self) -> usize {
        self.prn.all_transitions().iter().filter(|t| self.allows(t)).count()
    }
}

/// Enabled in the state, by the lattice, and by the limits.
pub fn dprn_enabled(dprn: &Dprn, t: &Transition, x: &State, lat: &ParametrisationLattice) -> bool {
    enabled_in_state(dprn.prn(), t, x) && dprn.allows(t) && enabled_by_lattice(dprn.prn(), t, lat)
}
