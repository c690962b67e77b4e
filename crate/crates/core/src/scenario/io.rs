use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FlowSpec, Scenario, StateSpec};
use crate::error::{Error, Result};
use crate::graph::{Link, NetworkGraph, NodeId};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    nodes: usize,
    edges: Vec<Link>,
    states: Vec<StateSpec>,
    flows: Vec<FlowEntry>,
    #[serde(default)]
    meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowEntry {
    src: NodeId,
    dst: NodeId,
    demand: f64,
    #[serde(default)]
    states: Vec<String>,
}

pub fn scenario_to_json(s: &Scenario) -> String {
    let file = ScenarioFile {
        nodes: s.graph.node_count(),
        edges: s.graph.links().to_vec(),
        states: s.states.clone(),
        flows: s
            .flows
            .iter()
            .map(|f| FlowEntry {
                src: f.src,
                dst: f.dst,
                demand: f.demand,
                states: f.states.iter().map(|&i| s.states[i].id.clone()).collect(),
            })
            .collect(),
        meta: s.meta.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
    text.push('\n');
    text
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let graph = NetworkGraph::from_links(file.nodes, file.edges)?;
    let index: BTreeMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let mut flows = Vec::with_capacity(file.flows.len());
    for (id, f) in file.flows.into_iter().enumerate() {
        let states = f
            .states
            .iter()
            .map(|sid| {
                index
                    .get(sid.as_str())
                    .copied()
                    .ok_or_else(|| Error::Parse(format!("flows[{id}].states: undeclared state `{sid}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        flows.push(FlowSpec { id, src: f.src, dst: f.dst, demand: f.demand, states });
    }
    let scenario = Scenario { graph, states: file.states, flows, meta: file.meta };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, scenario_to_json(s))?;
    Ok(())
}
