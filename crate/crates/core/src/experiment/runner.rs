use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::stats::{mean_ci, MeanCi};
use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, TrafficReport};
use crate::exact::ExactOptions;
use crate::rng;
use crate::scenario::Scenario;
use crate::solver::{SolveRequest, SolverRegistry};

pub const LOWER_BOUND: &str = "lower-bound";

/// One line of the raw CSV. Metric fields are empty when `status` is not `ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub topology: String,
    pub n: usize,
    pub traffic: String,
    pub sync_rate: f64,
    pub solver: String,
    pub seed: u64,
    pub objective: Option<f64>,
    pub data_total: Option<f64>,
    pub sync_total: Option<f64>,
    pub distinct_replicas: Option<usize>,
    pub max_link_load: Option<f64>,
    pub runtime_ms: f64,
    pub status: String,
}

pub const CSV_HEADER: &str =
    "experiment,topology,n,traffic,sync_rate,solver,seed,objective,data_total,sync_total,distinct_replicas,max_link_load,runtime_ms,status";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Cell {
    rate_idx: usize,
    order: usize,
    label: String,
    solver: Option<String>,
    cap: usize,
}

fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    let max_cap = *cfg.caps.iter().max().expect("validated");
    for rate_idx in 0..cfg.sync_rates.len() {
        let mut order = 0;
        let mut push = |label: String, solver: Option<String>, cap: usize| {
            out.push(Cell { rate_idx, order, label, solver, cap });
            order += 1;
        };
        if cfg.lower_bound {
            push(LOWER_BOUND.into(), None, 0);
        }
        for s in &cfg.solvers {
            if s == "snap" {
                push(s.clone(), Some(s.clone()), max_cap);
            } else {
                for &c in &cfg.caps {
                    push(format!("{s}-c{c}"), Some(s.clone()), c);
                }
            }
        }
    }
    out
}

fn status_of(e: &Error) -> String {
    let kind = match e {
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::UnplacedState(_) => "infeasible",
        _ => "error",
    };
    // Keep the CSV single-line and comma free.
    let msg: String = e.to_string().chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
    format!("{kind}: {msg}")
}

fn report_row(base: &ResultRow, report: &TrafficReport, distinct: usize) -> ResultRow {
    ResultRow {
        objective: Some(report.objective_total),
        data_total: Some(report.data_total),
        sync_total: Some(report.sync_total),
        distinct_replicas: Some(distinct),
        max_link_load: Some(report.max_link_load),
        status: "ok".into(),
        ..base.clone()
    }
}

/// Runs the full seed × cell matrix. Rows come back ordered by sweep cell,
/// then seed, independent of the thread count.
pub fn run_experiment(cfg: &ExperimentConfig, registry: &SolverRegistry) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    for s in &cfg.solvers {
        registry.get(s)?;
    }
    let cells = cells(cfg);
    let per_seed: Vec<Vec<(usize, ResultRow)>> =
        (0..cfg.seeds).into_par_iter().map(|i| run_seed(cfg, registry, &cells, i)).collect();
    let mut tagged: Vec<(usize, u64, ResultRow)> =
        per_seed.into_iter().flatten().map(|(c, r)| (c, r.seed, r)).collect();
    tagged.sort_by_key(|t| (t.0, t.1));
    Ok(tagged.into_iter().map(|t| t.2).collect())
}

fn run_seed(cfg: &ExperimentConfig, registry: &SolverRegistry, cells: &[Cell], i: usize) -> Vec<(usize, ResultRow)> {
    let n = cfg.topology.node_count();
    let base = |rate: f64, label: &str| ResultRow {
        experiment: cfg.name.clone(),
        topology: cfg.topology.label(),
        n,
        traffic: cfg.traffic.label().into(),
        sync_rate: rate,
        solver: label.into(),
        seed: i as u64,
        objective: None,
        data_total: None,
        sync_total: None,
        distinct_replicas: None,
        max_link_load: None,
        runtime_ms: 0.0,
        status: String::new(),
    };
    let instance = cfg.instance(i);
    let lower = instance.as_ref().ok().and_then(|s| Evaluator::new(s).ok().map(|ev| ev.lower_bound_report()));
    let mut pmr = cfg.pmr;
    pmr.rng_seed = rng::mix(rng::mix(cfg.instance_seed(i), 3), cfg.pmr.rng_seed);
    let exact = cfg.exact_budget.map(|budget| ExactOptions { budget }).unwrap_or_default();

    cells
        .iter()
        .enumerate()
        .map(|(idx, cell)| {
            let rate = cfg.sync_rates[cell.rate_idx];
            let b = base(rate, &cell.label);
            let start = Instant::now();
            let mut row = match (&instance, &cell.solver) {
                (Err(e), _) => ResultRow { status: status_of(e), ..b },
                (Ok(_), None) => report_row(&b, lower.as_ref().expect("connected instance"), 0),
                (Ok(s), Some(name)) => {
                    let scenario: Scenario = s.with_sync_rate(rate).with_max_replicas(cell.cap);
                    let req = SolveRequest { caps: Some(vec![cell.cap]), pmr, exact };
                    match registry.get(name).and_then(|solver| solver.solve(&scenario, &req)) {
                        Ok(out) => report_row(&b, &out.report, out.total_distinct()),
                        Err(e) => ResultRow { status: status_of(&e), ..b },
                    }
                }
            };
            row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            (idx, row)
        })
        .collect()
}

/// Raw rows as CSV text with the fixed header.
pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    if rows.is_empty() {
        return Ok(format!("{CSV_HEADER}\n"));
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(|e| Error::Parse(e.to_string()))).collect()
}

/// Aggregate over seeds for one (sync rate, solver label) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub topology: String,
    pub n: usize,
    pub traffic: String,
    pub sync_rate: f64,
    pub solver: String,
    pub runs: usize,
    pub failures: usize,
    pub objective_mean: f64,
    pub objective_ci95: f64,
    pub per_flow_mean: f64,
    pub data_mean: f64,
    pub sync_mean: f64,
    pub distinct_mean: f64,
    pub distinct_ci95: f64,
    pub max_link_load_mean: f64,
    /// Objective over the `exact-c<cap>` objective on the same seed; empty
    /// when no such reference exists.
    pub ratio_mean: Option<f64>,
    pub ratio_max: Option<f64>,
    pub runtime_ms_mean: f64,
}

impl SummaryRow {
    pub fn objective(&self) -> MeanCi {
        MeanCi { mean: self.objective_mean, ci95: self.objective_ci95, n: self.runs }
    }
}

fn reference_label(label: &str) -> Option<String> {
    let (family, cap) = label.rsplit_once("-c")?;
    (family != "exact" && cap.parse::<usize>().is_ok()).then(|| format!("exact-c{cap}"))
}

/// Summaries in first-appearance order of the raw rows.
pub fn summarize(rows: &[ResultRow], flows_per_instance: usize) -> Vec<SummaryRow> {
    let mut order: Vec<(u64, String)> = Vec::new();
    let mut groups: BTreeMap<(u64, String), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.sync_rate.to_bits(), r.solver.clone());
        let g = groups.entry(key.clone()).or_default();
        if g.is_empty() {
            order.push(key);
        }
        g.push(r);
    }
    let objective_of = |rate: u64, label: &str, seed: u64| -> Option<f64> {
        groups.get(&(rate, label.to_string()))?.iter().find(|r| r.seed == seed)?.objective
    };
    order
        .iter()
        .map(|key| {
            let g = &groups[key];
            let ok: Vec<&&ResultRow> = g.iter().filter(|r| r.status == "ok").collect();
            let col = |f: &dyn Fn(&ResultRow) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
            let obj = mean_ci(&col(&|r| r.objective));
            let distinct = mean_ci(&col(&|r| r.distinct_replicas.map(|d| d as f64)));
            let ratios: Vec<f64> = reference_label(&key.1)
                .map(|reference| {
                    ok.iter()
                        .filter_map(|r| Some(r.objective? / objective_of(key.0, &reference, r.seed)?))
                        .collect()
                })
                .unwrap_or_default();
            let first = g[0];
            SummaryRow {
                experiment: first.experiment.clone(),
                topology: first.topology.clone(),
                n: first.n,
                traffic: first.traffic.clone(),
                sync_rate: first.sync_rate,
                solver: first.solver.clone(),
                runs: ok.len(),
                failures: g.len() - ok.len(),
                objective_mean: obj.mean,
                objective_ci95: obj.ci95,
                per_flow_mean: obj.mean / flows_per_instance.max(1) as f64,
                data_mean: mean_ci(&col(&|r| r.data_total)).mean,
                sync_mean: mean_ci(&col(&|r| r.sync_total)).mean,
                distinct_mean: distinct.mean,
                distinct_ci95: distinct.ci95,
                max_link_load_mean: mean_ci(&col(&|r| r.max_link_load)).mean,
                ratio_mean: (!ratios.is_empty()).then(|| mean_ci(&ratios).mean),
                ratio_max: ratios.iter().copied().reduce(f64::max),
                runtime_ms_mean: g.iter().map(|r| r.runtime_ms).sum::<f64>() / g.len() as f64,
            }
        })
        .collect()
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ExperimentConfig;

    fn config(solvers: &str, caps: &str, seeds: usize) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"name": "t", "topology": {{"kind": "manhattan", "rows": 3, "cols": 3}},
                "sync_rates": [0.25, 1.0], "caps": {caps}, "seeds": {seeds}, "solvers": {solvers},
                "pmr": {{"local_search_iters": 200}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn header_is_exact() {
        let cfg = config(r#"["exact"]"#, "[2]", 1);
        let rows = run_experiment(&cfg, &SolverRegistry::with_builtin()).unwrap();
        let csv = rows_to_csv(&rows).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(rows_to_csv(&[]).unwrap().trim_end(), CSV_HEADER);
        assert_eq!(rows_from_csv(&csv).unwrap(), rows);
    }

    #[test]
    fn matrix_order_and_invariants() {
        let cfg = config(r#"["exact", "pmr", "snap"]"#, "[1, 2]", 3);
        let rows = run_experiment(&cfg, &SolverRegistry::with_builtin()).unwrap();
        // Per rate: lower-bound, exact×2, pmr×2, snap.
        assert_eq!(rows.len(), 2 * 6 * 3);
        let labels: Vec<&str> = rows.iter().step_by(3).map(|r| r.solver.as_str()).collect();
        assert_eq!(&labels[..6], ["lower-bound", "exact-c1", "exact-c2", "pmr-c1", "pmr-c2", "snap"]);
        assert_eq!(rows[0].seed, 0);
        assert_eq!(rows[2].seed, 2);
        for r in &rows {
            assert_eq!(r.status, "ok");
            assert_eq!(r.objective.unwrap(), r.data_total.unwrap() + r.sync_total.unwrap());
        }
        let get = |rate: f64, label: &str, seed: u64| {
            rows.iter().find(|r| r.sync_rate == rate && r.solver == label && r.seed == seed).unwrap().objective.unwrap()
        };
        for seed in 0..3 {
            for rate in [0.25, 1.0] {
                let lb = get(rate, LOWER_BOUND, seed);
                for label in ["exact-c1", "exact-c2", "pmr-c1", "pmr-c2", "snap"] {
                    assert!(lb <= get(rate, label, seed));
                }
                assert!(get(rate, "pmr-c2", seed) >= get(rate, "exact-c2", seed));
                assert_eq!(get(rate, "snap", seed), get(rate, "exact-c1", seed));
            }
        }
        let summary = summarize(&rows, 9);
        assert_eq!(summary.len(), 12);
        for s in &summary {
            match s.solver.as_str() {
                "pmr-c1" | "pmr-c2" => assert!(s.ratio_mean.unwrap() >= 1.0 && s.ratio_max.unwrap() >= 1.0),
                _ => assert!(s.ratio_mean.is_none()),
            }
            assert_eq!(s.runs, 3);
        }
    }

    #[test]
    fn deterministic_apart_from_runtime() {
        let cfg = config(r#"["pmr"]"#, "[2]", 4);
        let reg = SolverRegistry::with_builtin();
        let strip = |mut rows: Vec<ResultRow>| {
            rows.iter_mut().for_each(|r| r.runtime_ms = 0.0);
            rows
        };
        let a = strip(run_experiment(&cfg, &reg).unwrap());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = strip(pool.install(|| run_experiment(&cfg, &reg).unwrap()));
        assert_eq!(rows_to_csv(&a).unwrap(), rows_to_csv(&b).unwrap());
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut cfg = config(r#"["exact"]"#, "[2]", 2);
        cfg.exact_budget = Some(5);
        let rows = run_experiment(&cfg, &SolverRegistry::with_builtin()).unwrap();
        let failed: Vec<_> = rows.iter().filter(|r| r.solver == "exact-c2").collect();
        assert!(failed.iter().all(|r| r.status.starts_with("budget-exceeded") && r.objective.is_none()));
        let csv = rows_to_csv(&rows).unwrap();
        assert!(csv.lines().all(|l| l.split(',').count() == 14));
        let summary = summarize(&rows, 9);
        assert_eq!(summary.iter().find(|s| s.solver == "exact-c2").unwrap().failures, 2);
    }

    #[test]
    fn unknown_solver_is_rejected_upfront() {
        let cfg = config(r#"["ilp"]"#, "[2]", 1);
        assert!(matches!(run_experiment(&cfg, &SolverRegistry::with_builtin()), Err(Error::UnknownSolver(_))));
    }
}
