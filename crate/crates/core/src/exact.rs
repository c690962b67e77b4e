//! Exhaustive optimum over replica placements for uncapacitated instances.
//!
//! With unbounded capacities the total traffic decomposes per flow once the
//! placement is fixed, and the evaluator routes each flow optimally. The
//! optimum is therefore the best placement among all non-empty host subsets
//! of size up to the per-state cap. Coincident replicas are equivalent to
//! fewer distinct ones, so distinct subsets cover every placement.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{ordered_pair_hops, Evaluator, Placement, SingleStateCosts, TrafficReport};
use crate::graph::NodeId;
use crate::scenario::Scenario;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    /// Largest number of joint placements the solver may enumerate.
    pub budget: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactResult {
    #[serde(skip)]
    pub best_placement: Placement,
    pub best_report: TrafficReport,
    /// Distinct replica count per state at the optimum.
    pub optimal_distinct_counts: Vec<usize>,
    pub placements_examined: u64,
}

/// Optimal placement with at most `caps[s]` distinct replicas of state `s`.
pub fn solve_exact(scenario: &Scenario, caps: &[usize]) -> Result<ExactResult> {
    solve_exact_with(scenario, caps, ExactOptions::default())
}

pub fn solve_exact_with(scenario: &Scenario, caps: &[usize], opts: ExactOptions) -> Result<ExactResult> {
    let n = scenario.node_count();
    check_caps(scenario, caps)?;
    let combinations = placement_count(n, caps);
    if combinations > opts.budget {
        return Err(Error::BudgetExceeded { combinations, budget: opts.budget });
    }
    let ev = Evaluator::new(scenario)?;
    let per_state: Vec<Vec<Vec<NodeId>>> = caps.iter().map(|&cap| subsets_up_to(n, cap)).collect();

    let best = if scenario.states.len() == 1 {
        let costs = SingleStateCosts::new(scenario, ev.tables())?;
        per_state[0]
            .par_iter()
            .map(|hosts| Candidate { objective: costs.objective(hosts, ev.tables()).total(), sets: vec![hosts.clone()] })
            .reduce_with(Candidate::better)
    } else {
        let outer = per_state[0].len();
        (0..outer)
            .into_par_iter()
            .map(|i| {
                let mut best: Option<Candidate> = None;
                let mut idx = vec![0usize; per_state.len()];
                idx[0] = i;
                loop {
                    let sets: Vec<Vec<NodeId>> = idx.iter().zip(&per_state).map(|(&k, list)| list[k].clone()).collect();
                    let objective = ev.objective(&Placement::new(sets.clone())).expect("every state is placed").total();
                    let cand = Candidate { objective, sets };
                    best = Some(match best {
                        None => cand,
                        Some(b) => Candidate::better(b, cand),
                    });
                    if !advance(&mut idx[1..], &per_state[1..]) {
                        break;
                    }
                }
                best.expect("at least one placement")
            })
            .reduce_with(Candidate::better)
    }
    .expect("at least one placement");

    let placement = Placement::new(best.sets);
    let (_, report) = ev.evaluate(&placement)?;
    Ok(ExactResult {
        optimal_distinct_counts: (0..placement.state_count()).map(|s| placement.distinct_count(s)).collect(),
        best_placement: placement,
        best_report: report,
        placements_examined: combinations as u64,
    })
}

fn check_caps(scenario: &Scenario, caps: &[usize]) -> Result<()> {
    let n = scenario.node_count();
    if caps.len() != scenario.states.len() {
        return Err(Error::InvalidArgument(format!("{} caps given for {} states", caps.len(), scenario.states.len())));
    }
    if scenario.states.is_empty() {
        return Err(Error::InvalidArgument("scenario declares no states".into()));
    }
    for (st, &cap) in scenario.states.iter().zip(caps) {
        if cap < 1 || cap > st.max_replicas.min(n) {
            return Err(Error::InvalidArgument(format!(
                "cap {cap} for state `{}` outside 1..={}",
                st.id,
                st.max_replicas.min(n)
            )));
        }
    }
    Ok(())
}

/// Default caps: `min(C_s, N)` per state.
pub fn default_caps(scenario: &Scenario) -> Vec<usize> {
    scenario.states.iter().map(|s| s.max_replicas.min(scenario.node_count())).collect()
}

/// `Π_s Σ_{c=1..cap_s} C(n, c)`, saturating.
pub fn placement_count(n: usize, caps: &[usize]) -> u128 {
    caps.iter()
        .map(|&cap| (1..=cap).map(|c| binomial(n as u128, c as u128)).fold(0u128, u128::saturating_add))
        .fold(1u128, u128::saturating_mul)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// All non-empty subsets of `0..n` with at most `cap` elements, ordered by
/// size and then lexicographically.
pub fn subsets_up_to(n: usize, cap: usize) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    for size in 1..=cap.min(n) {
        let mut comb: Vec<NodeId> = (0..size).collect();
        loop {
            out.push(comb.clone());
            // rightmost position that can still move
            let Some(i) = (0..size).rev().find(|&i| comb[i] < n - size + i) else { break };
            comb[i] += 1;
            for j in i + 1..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    out
}

fn advance(idx: &mut [usize], lists: &[Vec<Vec<NodeId>>]) -> bool {
    for (k, list) in idx.iter_mut().zip(lists).rev() {
        *k += 1;
        if *k < list.len() {
            return true;
        }
        *k = 0;
    }
    false
}

#[derive(Debug, Clone)]
struct Candidate {
    objective: f64,
    sets: Vec<Vec<NodeId>>,
}

impl Candidate {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let count = |c: &Candidate| c.sets.iter().map(Vec::len).sum::<usize>();
        self.objective
            .total_cmp(&other.objective)
            .then_with(|| count(self).cmp(&count(other)))
            .then_with(|| self.sets.cmp(&other.sets))
    }

    fn better(a: Self, b: Self) -> Self {
        if b.key_cmp(&a) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

/// Optimal value of a single-state scenario for several sync rates at once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOptimum {
    pub sync_rate: f64,
    pub hosts: Vec<NodeId>,
    pub objective: f64,
    pub data_total: f64,
    pub sync_total: f64,
}

/// Enumerates the placements of a single-state scenario once and returns the
/// optimum for each sync rate. Equivalent to calling [`solve_exact`] on
/// `scenario.with_sync_rate(rate)` for every rate.
pub fn solve_exact_sweep(scenario: &Scenario, cap: usize, sync_rates: &[f64], opts: ExactOptions) -> Result<Vec<SweepOptimum>> {
    check_caps(scenario, &[cap])?;
    if scenario.states.len() != 1 {
        return Err(Error::InvalidArgument("sweep requires a single-state scenario".into()));
    }
    let combinations = placement_count(scenario.node_count(), &[cap]);
    if combinations > opts.budget {
        return Err(Error::BudgetExceeded { combinations, budget: opts.budget });
    }
    let ev = Evaluator::new(scenario)?;
    let costs = SingleStateCosts::new(scenario, ev.tables())?;
    let subsets = subsets_up_to(scenario.node_count(), cap);
    let parts: Vec<(f64, u64)> = subsets.par_iter().map(|h| (costs.data(h), ordered_pair_hops(h, ev.tables()))).collect();
    Ok(sync_rates
        .iter()
        .map(|&rate| {
            let eval = |i: usize| {
                let (data, hops) = parts[i];
                let sync = if rate <= 0.0 { 0.0 } else { rate * hops as f64 };
                (data + sync, data, sync)
            };
            // subsets are already in (size, lex) order, so the first minimum wins ties
            let mut best = 0;
            let mut best_obj = eval(0).0;
            for i in 1..subsets.len() {
                let o = eval(i).0;
                if o < best_obj {
                    best = i;
                    best_obj = o;
                }
            }
            let (objective, data_total, sync_total) = eval(best);
            SweepOptimum { sync_rate: rate, hosts: subsets[best].clone(), objective, data_total, sync_total }
        })
        .collect())
}

/// One row of the optimal-replica-count curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub sync_rate: f64,
    pub mean_distinct: f64,
    pub mean_objective: f64,
    pub mean_data: f64,
    pub mean_sync: f64,
    /// Mean single-replica optimum.
    pub mean_snap_objective: f64,
}

/// Averages the exact optimum over a family of single-state instances for
/// each sync rate, alongside the single-replica baseline.
pub fn optimal_replica_count_curve(instances: &[Scenario], sync_rates: &[f64], opts: ExactOptions) -> Result<Vec<CurvePoint>> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("no instances".into()));
    }
    let mut sums = vec![[0.0f64; 5]; sync_rates.len()];
    for s in instances {
        let cap = default_caps(s)[0];
        let sweep = solve_exact_sweep(s, cap, sync_rates, opts)?;
        let snap = solve_exact_sweep(s, 1, &[0.0], opts)?[0].objective;
        for (acc, opt) in sums.iter_mut().zip(&sweep) {
            acc[0] += opt.hosts.len() as f64;
            acc[1] += opt.objective;
            acc[2] += opt.data_total;
            acc[3] += opt.sync_total;
            acc[4] += snap;
        }
    }
    let k = instances.len() as f64;
    Ok(sync_rates
        .iter()
        .zip(sums)
        .map(|(&sync_rate, a)| CurvePoint {
            sync_rate,
            mean_distinct: a[0] / k,
            mean_objective: a[1] / k,
            mean_data: a[2] / k,
            mean_sync: a[3] / k,
            mean_snap_objective: a[4] / k,
        })
        .collect())
}
