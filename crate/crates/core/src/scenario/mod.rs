//! Scenario data model, generators and the JSON scenario file.

mod io;
pub mod topology;
pub mod traffic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NetworkGraph, NodeId};

pub use io::{load_scenario, parse_scenario, save_scenario, scenario_to_json};
pub use topology::{gen_manhattan, gen_watts_strogatz, gen_watts_strogatz_detailed, WattsStrogatz};
pub use traffic::{gen_clustered_traffic, gen_uniform_traffic};

/// A replicated state variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub id: String,
    /// Upper bound on the number of replicas.
    pub max_replicas: usize,
    /// Traffic each replica sends to every other distinct replica, per hop.
    pub sync_rate: f64,
}

/// One traffic demand. `states` holds indices into [`Scenario::states`], in
/// the order the flow must visit them.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub id: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub demand: f64,
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: NetworkGraph,
    pub states: Vec<StateSpec>,
    pub flows: Vec<FlowSpec>,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl Scenario {
    pub fn new(graph: NetworkGraph, states: Vec<StateSpec>, flows: Vec<FlowSpec>) -> Result<Self> {
        let s = Self { graph, states, flows, meta: BTreeMap::new() };
        s.validate()?;
        Ok(s)
    }

    /// Scenario with one state `s` that every flow must traverse.
    pub fn single_state(graph: NetworkGraph, mut flows: Vec<FlowSpec>, max_replicas: usize, sync_rate: f64) -> Result<Self> {
        for f in &mut flows {
            f.states = vec![0];
        }
        let state = StateSpec { id: "s".into(), max_replicas, sync_rate };
        Self::new(graph, vec![state], flows)
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s.id == id)
    }

    /// Copy with every state's sync rate replaced.
    pub fn with_sync_rate(&self, rate: f64) -> Self {
        let mut s = self.clone();
        s.states.iter_mut().for_each(|st| st.sync_rate = rate);
        s
    }

    /// Copy with every state's replica bound replaced.
    pub fn with_max_replicas(&self, max_replicas: usize) -> Self {
        let mut s = self.clone();
        s.states.iter_mut().for_each(|st| st.max_replicas = max_replicas);
        s
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.node_count();
        let mut ids = std::collections::HashSet::new();
        for st in &self.states {
            if !ids.insert(st.id.as_str()) {
                return Err(Error::InvalidScenario(format!("duplicate state id `{}`", st.id)));
            }
            if st.max_replicas < 1 {
                return Err(Error::InvalidScenario(format!("state `{}`: max_replicas must be >= 1", st.id)));
            }
            if !(st.sync_rate >= 0.0) || !st.sync_rate.is_finite() {
                return Err(Error::InvalidScenario(format!("state `{}`: sync_rate must be finite and >= 0", st.id)));
            }
        }
        for (i, f) in self.flows.iter().enumerate() {
            if f.src >= n || f.dst >= n {
                return Err(Error::InvalidScenario(format!("flow {i}: endpoint outside 0..{n}")));
            }
            if f.src == f.dst {
                return Err(Error::InvalidScenario(format!("flow {i}: source equals destination")));
            }
            if !(f.demand > 0.0) || !f.demand.is_finite() {
                return Err(Error::InvalidScenario(format!("flow {i}: demand must be positive")));
            }
            for (k, &s) in f.states.iter().enumerate() {
                if s >= self.states.len() {
                    return Err(Error::InvalidScenario(format!("flow {i}: undeclared state index {s}")));
                }
                if f.states[..k].contains(&s) {
                    return Err(Error::InvalidScenario(format!("flow {i}: state `{}` listed twice", self.states[s].id)));
                }
            }
        }
        Ok(())
    }
}

/// Capacities serialize as numbers, with the string `"inf"` for unbounded links.
pub mod capacity_serde {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct CapacityVisitor;
        impl Visitor<'_> for CapacityVisitor {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(f64::INFINITY),
                    other => other.parse().map_err(|_| E::custom(format!("invalid capacity `{other}`"))),
                }
            }
        }
        d.deserialize_any(CapacityVisitor)
    }
}
