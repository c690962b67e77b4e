//! PlaceMultiReplicas: partition the graph, seed one replica per partition at
//! its most central node, then improve by random one-hop replica moves.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, Placement, RoutedSolution, SingleStateCosts, TrafficReport};
use crate::graph::{compute_partitions, NetworkGraph, NodeId};
use crate::rng::{self, Rng};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PmrConfig {
    pub local_search_iters: usize,
    pub partition_iters: usize,
    pub rng_seed: u64,
    /// Let a replica move onto a node that already hosts one.
    pub allow_coincident_moves: bool,
    pub record_trace: bool,
}

impl Default for PmrConfig {
    fn default() -> Self {
        Self { local_search_iters: 1000, partition_iters: 10, rng_seed: 0, allow_coincident_moves: true, record_trace: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PmrResult {
    #[serde(skip)]
    pub placement: Placement,
    pub report: TrafficReport,
    pub distinct_count: usize,
    /// Objective of the partition/betweenness placement before local search.
    pub initial_objective: f64,
    pub iterations_improved: usize,
    /// `(iteration, incumbent objective)` after each evaluation.
    pub trace: Option<Vec<(usize, f64)>>,
}

const MOVE_RETRIES: usize = 32;

/// Runs the three phases on a single-state scenario with `c_s` replicas.
pub fn place_multi_replicas(scenario: &Scenario, c_s: usize, cfg: &PmrConfig) -> Result<PmrResult> {
    if scenario.states.len() != 1 {
        return Err(Error::PmrMultiState(scenario.states.len()));
    }
    let n = scenario.node_count();
    if c_s == 0 || c_s > n {
        return Err(Error::InvalidArgument(format!("replica count {c_s} outside 1..={n}")));
    }
    if c_s > scenario.states[0].max_replicas {
        return Err(Error::InvalidArgument(format!(
            "replica count {c_s} exceeds the state's bound {}",
            scenario.states[0].max_replicas
        )));
    }
    if cfg.partition_iters == 0 {
        return Err(Error::InvalidArgument("partition_iters must be at least 1".into()));
    }
    let g = &scenario.graph;
    let ev = Evaluator::new(scenario)?;
    let costs = SingleStateCosts::new(scenario, ev.tables())?;
    let objective = |hosts: &[NodeId]| {
        let mut distinct = hosts.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        costs.objective(&distinct, ev.tables()).total()
    };

    // Phases 1 and 2: the partition leaders are the max-betweenness nodes of
    // their induced subgraphs.
    let partitions = compute_partitions(g, c_s, cfg.partition_iters, rng::mix(cfg.rng_seed, 1))?;
    let initial = partitions.centers.clone();
    let initial_objective = objective(&initial);

    // Phase 3: every iteration evaluates the current candidate, keeps it if
    // strictly better, and perturbs the incumbent for the next round.
    let mut rng = rng::derived(cfg.rng_seed, 2);
    let mut incumbent = initial.clone();
    let mut best = f64::INFINITY;
    let mut current = initial;
    let mut improved = 0;
    let mut trace = cfg.record_trace.then(Vec::new);
    for it in 0..cfg.local_search_iters {
        let value = objective(&current);
        if value < best {
            if best.is_finite() {
                improved += 1;
            }
            best = value;
            incumbent = current;
        }
        if let Some(t) = trace.as_mut() {
            t.push((it, best));
        }
        current = perturb_replica_location(&incumbent, g, &mut rng, cfg.allow_coincident_moves);
    }

    let placement = Placement::single(incumbent);
    let (_, report) = ev.evaluate(&placement)?;
    debug_assert!(cfg.local_search_iters == 0 || report.objective_total == best);
    Ok(PmrResult {
        distinct_count: placement.distinct_count(0),
        placement,
        report,
        initial_objective,
        iterations_improved: improved,
        trace,
    })
}

/// Moves one uniformly chosen replica to a uniformly chosen neighbour of its
/// host. Without coincident moves, occupied neighbours are re-drawn a bounded
/// number of times before giving up and returning the input unchanged.
pub fn perturb_replica_location(hosts: &[NodeId], g: &NetworkGraph, rng: &mut Rng, allow_coincident: bool) -> Vec<NodeId> {
    let mut out = hosts.to_vec();
    if hosts.is_empty() {
        return out;
    }
    for _ in 0..MOVE_RETRIES {
        let i = rng.gen_range(0..hosts.len());
        let nbrs = g.neighbors(hosts[i]);
        if nbrs.is_empty() {
            continue;
        }
        let target = nbrs[rng.gen_range(0..nbrs.len())];
        if !allow_coincident && hosts.contains(&target) {
            continue;
        }
        out[i] = target;
        return out;
    }
    out
}

/// Routes every flow through its closest replica (the one minimising
/// `dist(src, r) + dist(r, dst)`, lowest id on ties) and adds pairwise sync
/// traffic. Restricted to flows that need at most the single state.
pub fn route_flows(scenario: &Scenario, placement: &Placement) -> Result<(f64, RoutedSolution, TrafficReport)> {
    if scenario.states.len() != 1 {
        return Err(Error::PmrMultiState(scenario.states.len()));
    }
    let (sol, report) = crate::evaluator::evaluate(scenario, placement)?;
    Ok((report.objective_total, sol, report))
}
