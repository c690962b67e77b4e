//! Placement strategies behind one trait, looked up by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::evaluator::{Placement, TrafficReport};
use crate::exact::{default_caps, solve_exact_with, ExactOptions};
use crate::pmr::{place_multi_replicas, PmrConfig};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Default)]
pub struct SolveRequest {
    /// Replica cap per state; `None` uses each state's `max_replicas`
    /// (bounded by the node count).
    pub caps: Option<Vec<usize>>,
    pub pmr: PmrConfig,
    pub exact: ExactOptions,
}

impl SolveRequest {
    pub fn caps_for(&self, scenario: &Scenario) -> Vec<usize> {
        self.caps.clone().unwrap_or_else(|| default_caps(scenario))
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solver: &'static str,
    pub placement: Placement,
    pub report: TrafficReport,
    pub distinct_counts: Vec<usize>,
    /// Solver-specific extras for JSON output.
    pub details: serde_json::Value,
}

impl SolveOutcome {
    pub fn total_distinct(&self) -> usize {
        self.distinct_counts.iter().sum()
    }
}

pub trait PlacementSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, scenario: &Scenario, req: &SolveRequest) -> Result<SolveOutcome>;
}

/// Exhaustive enumeration of distinct host subsets.
pub struct ExactSolver;

impl PlacementSolver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }
    fn description(&self) -> &'static str {
        "exhaustive optimum over replica placements (small instances)"
    }
    fn solve(&self, scenario: &Scenario, req: &SolveRequest) -> Result<SolveOutcome> {
        let r = solve_exact_with(scenario, &req.caps_for(scenario), req.exact)?;
        Ok(SolveOutcome {
            solver: self.name(),
            details: json!({ "placements_examined": r.placements_examined }),
            distinct_counts: r.optimal_distinct_counts,
            placement: r.best_placement,
            report: r.best_report,
        })
    }
}

/// Exact optimum restricted to one replica per state.
pub struct SnapSolver;

impl PlacementSolver for SnapSolver {
    fn name(&self) -> &'static str {
        "snap"
    }
    fn description(&self) -> &'static str {
        "single-replica optimum baseline"
    }
    fn solve(&self, scenario: &Scenario, req: &SolveRequest) -> Result<SolveOutcome> {
        let caps = vec![1; scenario.states.len()];
        let r = solve_exact_with(scenario, &caps, req.exact)?;
        Ok(SolveOutcome {
            solver: self.name(),
            details: json!({ "placements_examined": r.placements_examined }),
            distinct_counts: r.optimal_distinct_counts,
            placement: r.best_placement,
            report: r.best_report,
        })
    }
}

/// Partition, betweenness seeding, local search.
pub struct PmrSolver;

impl PlacementSolver for PmrSolver {
    fn name(&self) -> &'static str {
        "pmr"
    }
    fn description(&self) -> &'static str {
        "PlaceMultiReplicas heuristic (single state)"
    }
    fn solve(&self, scenario: &Scenario, req: &SolveRequest) -> Result<SolveOutcome> {
        if scenario.states.len() != 1 {
            return Err(Error::PmrMultiState(scenario.states.len()));
        }
        let c_s = req.caps_for(scenario)[0];
        let r = place_multi_replicas(scenario, c_s, &req.pmr)?;
        Ok(SolveOutcome {
            solver: self.name(),
            details: json!({
                "initial_objective": r.initial_objective,
                "iterations_improved": r.iterations_improved,
                "trace": r.trace,
            }),
            distinct_counts: vec![r.distinct_count],
            placement: r.placement,
            report: r.report,
        })
    }
}

#[derive(Clone, Default)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn PlacementSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry with `exact`, `pmr` and `snap`.
    pub fn with_builtin() -> Self {
        let mut r = Self::empty();
        r.register(ExactSolver);
        r.register(PmrSolver);
        r.register(SnapSolver);
        r
    }

    pub fn register<S: PlacementSolver + 'static>(&mut self, solver: S) {
        self.solvers.insert(solver.name(), Arc::new(solver));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PlacementSolver>> {
        self.solvers.get(name).cloned().ok_or_else(|| Error::UnknownSolver(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    pub fn list(&self) -> Vec<(&'static str, &'static str)> {
        self.solvers.values().map(|s| (s.name(), s.description())).collect()
    }
}
