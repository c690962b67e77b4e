use serde::Serialize;

use super::Placement;
use crate::error::{Error, Result};
use crate::graph::{DistanceTables, NodeId};
use crate::scenario::{FlowSpec, StateSpec};

/// How one flow is carried: the replica visited for each state of its
/// sequence and the resulting node walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowRoute {
    pub flow: usize,
    /// Host chosen for each entry of the flow's state sequence.
    pub choice: Vec<NodeId>,
    pub walk: Vec<NodeId>,
    pub hops: u32,
}

/// Synchronization path between two distinct replica hosts of one state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyncPath {
    pub state: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub path: Vec<NodeId>,
}

fn layer_hosts(f: &FlowSpec, placement: &Placement) -> Result<Vec<Vec<NodeId>>> {
    f.states
        .iter()
        .map(|&s| {
            let h = placement.distinct_hosts(s);
            if h.is_empty() {
                Err(Error::UnplacedState(format!("#{s}")))
            } else {
                Ok(h)
            }
        })
        .collect()
}

/// Hop-minimal walk `src → r_1 → … → r_k → dst` through one host per state.
///
/// Layered dynamic program over hop distances. Among optimal host tuples the
/// lexicographically smallest is chosen (lowest id at the earliest layer
/// first). A replica at the source or destination costs a zero-hop segment.
pub fn route_flow_sequence(f: &FlowSpec, placement: &Placement, dt: &DistanceTables) -> Result<FlowRoute> {
    let layers = layer_hosts(f, placement)?;
    // cost_to_go[i][j]: hops from host j of layer i to dst through layers i+1..
    let mut cost_to_go: Vec<Vec<u64>> = vec![Vec::new(); layers.len()];
    for i in (0..layers.len()).rev() {
        cost_to_go[i] = layers[i]
            .iter()
            .map(|&h| match layers.get(i + 1) {
                None => dt.dist(h, f.dst) as u64,
                Some(next) => next
                    .iter()
                    .zip(&cost_to_go[i + 1])
                    .map(|(&m, &c)| dt.dist(h, m) as u64 + c)
                    .min()
                    .expect("non-empty layer"),
            })
            .collect();
    }
    let mut choice = Vec::with_capacity(layers.len());
    let mut at = f.src;
    for (hosts, costs) in layers.iter().zip(&cost_to_go) {
        let mut best = 0;
        let mut best_cost = u64::MAX;
        // hosts ascend, strict < keeps the lowest id on ties
        for (j, (&h, &c)) in hosts.iter().zip(costs).enumerate() {
            let total = dt.dist(at, h) as u64 + c;
            if total < best_cost {
                best_cost = total;
                best = j;
            }
        }
        at = hosts[best];
        choice.push(at);
    }
    let mut walk = Vec::new();
    let mut from = f.src;
    for &h in choice.iter().chain(std::iter::once(&f.dst)) {
        dt.extend_path(from, h, &mut walk);
        from = h;
    }
    let hops = (walk.len() - 1) as u32;
    Ok(FlowRoute { flow: f.id, choice, walk, hops })
}

/// Hop length of the optimal walk, without materializing it.
pub fn flow_hops(f: &FlowSpec, placement: &Placement, dt: &DistanceTables) -> Result<u32> {
    let layers = layer_hosts(f, placement)?;
    let mut frontier: Vec<(NodeId, u64)> = vec![(f.src, 0)];
    for hosts in &layers {
        frontier = hosts
            .iter()
            .map(|&h| (h, frontier.iter().map(|&(p, c)| c + dt.dist(p, h) as u64).min().expect("non-empty")))
            .collect();
    }
    Ok(frontier.iter().map(|&(p, c)| c + dt.dist(p, f.dst) as u64).min().expect("non-empty") as u32)
}

/// Sum of hop distances over ordered pairs of distinct hosts.
pub fn ordered_pair_hops(hosts: &[NodeId], dt: &DistanceTables) -> u64 {
    let mut total = 0u64;
    for (i, &a) in hosts.iter().enumerate() {
        for &b in &hosts[i + 1..] {
            total += 2 * dt.dist(a, b) as u64;
        }
    }
    total
}

/// Total synchronization traffic and the paths carrying it.
///
/// Every ordered pair of distinct hosts of a state with a positive rate gets
/// one shortest path; coincident replicas contribute nothing.
pub fn sync_traffic(states: &[StateSpec], placement: &Placement, dt: &DistanceTables) -> (f64, Vec<SyncPath>) {
    let mut total = 0.0;
    let mut paths = Vec::new();
    for (s, st) in states.iter().enumerate() {
        if st.sync_rate <= 0.0 {
            continue;
        }
        let hosts = placement.distinct_hosts(s);
        total += sync_cost(st.sync_rate, &hosts, dt);
        for &a in &hosts {
            for &b in &hosts {
                if a != b {
                    paths.push(SyncPath { state: s, from: a, to: b, path: dt.path(a, b) });
                }
            }
        }
    }
    (total, paths)
}

/// Sync traffic of one state given its distinct hosts.
#[inline]
pub fn sync_cost(rate: f64, distinct_hosts: &[NodeId], dt: &DistanceTables) -> f64 {
    if rate <= 0.0 {
        0.0
    } else {
        rate * ordered_pair_hops(distinct_hosts, dt) as f64
    }
}
