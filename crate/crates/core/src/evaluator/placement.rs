use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::scenario::Scenario;

/// Replica hosts per state, indexed like [`Scenario::states`].
///
/// A host may appear more than once; coincident replicas behave as a single
/// instance for routing and synchronization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    hosts: Vec<Vec<NodeId>>,
}

impl Placement {
    pub fn new(hosts: Vec<Vec<NodeId>>) -> Self {
        Self { hosts }
    }

    /// Placement for a one-state scenario.
    pub fn single(hosts: Vec<NodeId>) -> Self {
        Self { hosts: vec![hosts] }
    }

    pub fn state_count(&self) -> usize {
        self.hosts.len()
    }

    pub fn hosts(&self, state: usize) -> &[NodeId] {
        self.hosts.get(state).map_or(&[], Vec::as_slice)
    }

    pub fn hosts_mut(&mut self, state: usize) -> &mut Vec<NodeId> {
        &mut self.hosts[state]
    }

    /// Distinct hosts of `state`, ascending.
    pub fn distinct_hosts(&self, state: usize) -> Vec<NodeId> {
        let mut h = self.hosts(state).to_vec();
        h.sort_unstable();
        h.dedup();
        h
    }

    pub fn distinct_count(&self, state: usize) -> usize {
        self.distinct_hosts(state).len()
    }

    pub fn total_distinct(&self) -> usize {
        (0..self.hosts.len()).map(|s| self.distinct_count(s)).sum()
    }

    /// Checks replica bounds and node ranges against `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.hosts.len() != scenario.states.len() {
            return Err(Error::InvalidArgument(format!(
                "placement covers {} states, scenario declares {}",
                self.hosts.len(),
                scenario.states.len()
            )));
        }
        for (st, hosts) in scenario.states.iter().zip(&self.hosts) {
            if hosts.len() > st.max_replicas {
                return Err(Error::InvalidArgument(format!(
                    "state `{}` has {} replicas, bound is {}",
                    st.id,
                    hosts.len(),
                    st.max_replicas
                )));
            }
            if let Some(&n) = hosts.iter().find(|&&n| n >= scenario.node_count()) {
                return Err(Error::InvalidArgument(format!("state `{}` placed on unknown node {n}", st.id)));
            }
        }
        Ok(())
    }

    pub fn to_named(&self, scenario: &Scenario) -> BTreeMap<String, Vec<NodeId>> {
        scenario.states.iter().zip(&self.hosts).map(|(s, h)| (s.id.clone(), h.clone())).collect()
    }

    pub fn from_named(scenario: &Scenario, named: &BTreeMap<String, Vec<NodeId>>) -> Result<Self> {
        let mut hosts = vec![Vec::new(); scenario.states.len()];
        for (id, h) in named {
            let i = scenario.state_index(id).ok_or_else(|| Error::InvalidArgument(format!("unknown state `{id}`")))?;
            hosts[i] = h.clone();
        }
        Ok(Self { hosts })
    }
}

/// JSON form keyed by state id.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NamedPlacement(pub BTreeMap<String, Vec<NodeId>>);
