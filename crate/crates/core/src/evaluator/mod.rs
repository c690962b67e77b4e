//! Routing and traffic accounting for a given placement.
//!
//! Everything that assigns a cost to a placement goes through this module, so
//! the exact solver, the heuristic and the experiment runner agree on the
//! objective by construction.

mod placement;
mod routing;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{all_pairs_shortest_paths, DistanceTables, NodeId};
use crate::scenario::Scenario;

pub use placement::{NamedPlacement, Placement};
pub use routing::{flow_hops, ordered_pair_hops, route_flow_sequence, sync_cost, sync_traffic, FlowRoute, SyncPath};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutedSolution {
    pub flows: Vec<FlowRoute>,
    pub sync: Vec<SyncPath>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficReport {
    pub data_total: f64,
    pub sync_total: f64,
    pub objective_total: f64,
    pub max_link_load: f64,
    /// Load per directed edge id.
    pub per_edge_load: Vec<f64>,
    pub capacity_feasible: bool,
}

/// Data and sync components of the total-traffic objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParts {
    pub data: f64,
    pub sync: f64,
}

impl ObjectiveParts {
    pub fn total(&self) -> f64 {
        self.data + self.sync
    }
}

/// A scenario together with its distance tables.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    dt: DistanceTables,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        Ok(Self { scenario, dt: all_pairs_shortest_paths(&scenario.graph)? })
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn tables(&self) -> &DistanceTables {
        &self.dt
    }

    fn check_coverage(&self, placement: &Placement) -> Result<()> {
        for f in &self.scenario.flows {
            for &s in &f.states {
                if placement.hosts(s).is_empty() {
                    return Err(Error::UnplacedState(self.scenario.states[s].id.clone()));
                }
            }
        }
        Ok(())
    }

    /// Objective value without building walks or loads.
    pub fn objective(&self, placement: &Placement) -> Result<ObjectiveParts> {
        self.check_coverage(placement)?;
        let mut data = 0.0;
        for f in &self.scenario.flows {
            data += f.demand * flow_hops(f, placement, &self.dt)? as f64;
        }
        let sync = self
            .scenario
            .states
            .iter()
            .enumerate()
            .map(|(s, st)| sync_cost(st.sync_rate, &placement.distinct_hosts(s), &self.dt))
            .sum();
        Ok(ObjectiveParts { data, sync })
    }

    /// Routes every flow, adds synchronization paths and accumulates loads.
    pub fn evaluate(&self, placement: &Placement) -> Result<(RoutedSolution, TrafficReport)> {
        placement.validate(self.scenario)?;
        self.check_coverage(placement)?;
        let g = &self.scenario.graph;
        let mut load = vec![0.0; g.edge_count()];
        let mut add_walk = |walk: &[NodeId], amount: f64| {
            for w in walk.windows(2) {
                let e = g.edge_between(w[0], w[1]).expect("walk follows graph edges");
                load[e] += amount;
            }
        };

        let mut flows = Vec::with_capacity(self.scenario.flows.len());
        let mut data_total = 0.0;
        for f in &self.scenario.flows {
            let route = route_flow_sequence(f, placement, &self.dt)?;
            data_total += f.demand * route.hops as f64;
            add_walk(&route.walk, f.demand);
            flows.push(route);
        }
        let (sync_total, sync) = sync_traffic(&self.scenario.states, placement, &self.dt);
        for p in &sync {
            add_walk(&p.path, self.scenario.states[p.state].sync_rate);
        }

        let max_link_load = load.iter().copied().fold(0.0, f64::max);
        let capacity_feasible = load.iter().zip(g.edges()).all(|(&l, e)| l <= e.capacity);
        let report = TrafficReport {
            data_total,
            sync_total,
            objective_total: data_total + sync_total,
            max_link_load,
            per_edge_load: load,
            capacity_feasible,
        };
        Ok((RoutedSolution { flows, sync }, report))
    }

    /// Traffic when every flow takes its direct shortest path and no state
    /// needs to be visited: a lower bound for any placement.
    pub fn lower_bound(&self) -> f64 {
        self.scenario.flows.iter().map(|f| f.demand * self.dt.dist(f.src, f.dst) as f64).sum()
    }

    /// Full report for the direct-routing relaxation behind [`Self::lower_bound`].
    pub fn lower_bound_report(&self) -> TrafficReport {
        let mut relaxed = self.scenario.clone();
        for f in &mut relaxed.flows {
            f.states.clear();
        }
        let empty = Placement::new(vec![Vec::new(); relaxed.states.len()]);
        let ev = Evaluator { scenario: &relaxed, dt: self.dt.clone() };
        ev.evaluate(&empty).expect("stateless flows need no replicas").1
    }
}

/// Convenience wrapper computing distance tables on the fly.
pub fn evaluate(scenario: &Scenario, placement: &Placement) -> Result<(RoutedSolution, TrafficReport)> {
    Evaluator::new(scenario)?.evaluate(placement)
}

/// Precomputed per-flow detour costs for single-state scenarios.
///
/// `cost[f][r]` is the walk length of flow `f` through a replica at `r`, so
/// the data traffic of a host set is a per-flow minimum over its hosts. Sums
/// run in flow order, matching [`Evaluator::objective`] bit for bit.
#[derive(Debug, Clone)]
pub struct SingleStateCosts {
    n: usize,
    demand: Vec<f64>,
    cost: Vec<u32>,
    sync_rate: f64,
}

impl SingleStateCosts {
    pub fn new(scenario: &Scenario, dt: &DistanceTables) -> Result<Self> {
        if scenario.states.len() != 1 {
            return Err(Error::InvalidArgument(format!("expected a single-state scenario, got {} states", scenario.states.len())));
        }
        let n = scenario.node_count();
        let mut cost = Vec::with_capacity(n * scenario.flows.len());
        for f in &scenario.flows {
            match f.states.as_slice() {
                [] => cost.extend(std::iter::repeat_n(dt.dist(f.src, f.dst), n)),
                [_] => cost.extend((0..n).map(|r| dt.dist(f.src, r) + dt.dist(r, f.dst))),
                _ => unreachable!("validated scenario lists each state once"),
            }
        }
        Ok(Self { n, demand: scenario.flows.iter().map(|f| f.demand).collect(), cost, sync_rate: scenario.states[0].sync_rate })
    }

    /// Data traffic for the given distinct hosts (non-empty).
    pub fn data(&self, hosts: &[NodeId]) -> f64 {
        let mut total = 0.0;
        for (f, &d) in self.demand.iter().enumerate() {
            let row = &self.cost[f * self.n..(f + 1) * self.n];
            let best = hosts.iter().map(|&h| row[h]).min().expect("non-empty host set");
            total += d * best as f64;
        }
        total
    }

    pub fn objective(&self, hosts: &[NodeId], dt: &DistanceTables) -> ObjectiveParts {
        ObjectiveParts { data: self.data(hosts), sync: sync_cost(self.sync_rate, hosts, dt) }
    }
}

/// JSON document describing a routed solution.
pub fn solution_json(scenario: &Scenario, placement: &Placement, sol: &RoutedSolution, report: &TrafficReport) -> serde_json::Value {
    let g = &scenario.graph;
    let flows: Vec<_> = sol
        .flows
        .iter()
        .map(|r| {
            let f = &scenario.flows[r.flow];
            json!({ "id": r.flow, "src": f.src, "dst": f.dst, "replicas": r.choice, "walk": r.walk, "hops": r.hops })
        })
        .collect();
    let sync: Vec<_> = sol
        .sync
        .iter()
        .map(|p| json!({ "state": scenario.states[p.state].id, "from": p.from, "to": p.to, "path": p.path }))
        .collect();
    let edges: Vec<_> = g
        .edges()
        .iter()
        .zip(&report.per_edge_load)
        .map(|(e, &l)| {
            let cap = if e.capacity.is_infinite() { json!("inf") } else { json!(e.capacity) };
            json!({ "u": e.from, "v": e.to, "load": l, "capacity": cap })
        })
        .collect();
    let distinct: serde_json::Map<_, _> = scenario
        .states
        .iter()
        .enumerate()
        .map(|(s, st)| (st.id.clone(), json!(placement.distinct_count(s))))
        .collect();
    json!({
        "placement": placement.to_named(scenario),
        "distinct_replicas": distinct,
        "flows": flows,
        "sync": sync,
        "edges": edges,
        "data_total": report.data_total,
        "sync_total": report.sync_total,
        "objective_total": report.objective_total,
        "max_link_load": report.max_link_load,
        "capacity_feasible": report.capacity_feasible,
    })
}
