//! Tables behind the unit-square model plots.

use serde::{Deserialize, Serialize};

use super::svg::LineChart;
use crate::asymptotic::{approx_optimal_replicas, default_c_max, fit_power_law, optimal_replicas_from, AsymptoticFit, DistanceEstimate, FitPoint};
use crate::error::{Error, Result};
use crate::pmr::{place_multi_replicas, PmrConfig};
use crate::scenario::Scenario;

pub fn perfect_squares(lo: usize, hi: usize) -> Vec<usize> {
    (1..).map(|k: usize| k * k).skip_while(|&n| n < lo).take_while(|&n| n <= hi).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalCountRow {
    pub n: usize,
    /// λ̂_s / λ_f
    pub ratio: f64,
    pub c_search: usize,
    pub c_formula: usize,
    pub abs_error: usize,
}

/// Search and closed-form optimal counts for every `(n, ratio)`. `curve`
/// holds estimates for `c = 1, 2, …` and must reach `⌈2√n⌉` for the largest n.
pub fn optimal_count_table(ns: &[usize], ratios: &[f64], curve: &[DistanceEstimate]) -> Result<Vec<OptimalCountRow>> {
    let mut rows = Vec::with_capacity(ns.len() * ratios.len());
    for &n in ns {
        let c_max = default_c_max(n);
        if curve.len() < c_max {
            return Err(Error::InvalidArgument(format!("distance curve stops at c={} but n={n} needs {c_max}", curve.len())));
        }
        for &ratio in ratios {
            let c_search = optimal_replicas_from(n, 1.0, ratio, &curve[..c_max])?;
            let c_formula = approx_optimal_replicas(n, 1.0, ratio)?;
            rows.push(OptimalCountRow { n, ratio, c_search, c_formula, abs_error: c_search.abs_diff(c_formula) });
        }
    }
    Ok(rows)
}

pub fn fit_table(rows: &[OptimalCountRow]) -> Result<AsymptoticFit> {
    let points: Vec<FitPoint> = rows.iter().map(|r| FitPoint { n: r.n, ratio: r.ratio, c_opt: r.c_search }).collect();
    fit_power_law(&points)
}

/// Distinct replica count of the best PMR solution over `c_s = 1..=c_hi`
/// (lowest objective, fewer replicas on ties), with that objective.
pub fn pmr_replica_count(scenario: &Scenario, c_hi: usize, cfg: &PmrConfig) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for c_s in 1..=c_hi.min(scenario.node_count()) {
        let s = scenario.with_max_replicas(c_s);
        let r = place_multi_replicas(&s, c_s, cfg)?;
        if best.is_none_or(|(_, b)| r.report.objective_total < b) {
            best = Some((r.distinct_count, r.report.objective_total));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("c_hi must be at least 1".into()))
}

pub fn dcurve_chart(curve: &[DistanceEstimate]) -> LineChart {
    let mut chart = LineChart::new("Expected unit-square distances", "replicas c", "distance");
    chart.push("d_data", curve.iter().map(|e| (e.c as f64, e.d_data)).collect());
    chart.push("d_sync", curve.iter().filter(|e| e.c > 1).map(|e| (e.c as f64, e.d_sync)).collect());
    chart
}

/// Optimal count against N, one series per ratio, both axes logarithmic.
pub fn optimal_count_chart(rows: &[OptimalCountRow], fit: Option<&AsymptoticFit>) -> LineChart {
    let mut chart = LineChart::new("Optimal replica count", "nodes N", "C_opt");
    chart.log_x = true;
    chart.log_y = true;
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();
    for ratio in ratios {
        let sel: Vec<&OptimalCountRow> = rows.iter().filter(|r| r.ratio == ratio).collect();
        chart.push(format!("search {ratio}"), sel.iter().map(|r| (r.n as f64, r.c_search as f64)).collect());
        if let Some(f) = fit {
            chart.push(format!("fit {ratio}"), sel.iter().map(|r| (r.n as f64, f.predict(r.n, ratio))).collect());
        }
    }
    chart
}

pub fn error_chart(rows: &[OptimalCountRow]) -> LineChart {
    let mut chart = LineChart::new("Formula error", "nodes N", "|C_formula - C_opt|");
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();
    for ratio in ratios {
        chart.push(
            format!("ratio {ratio}"),
            rows.iter().filter(|r| r.ratio == ratio).map(|r| (r.n as f64, r.abs_error as f64)).collect(),
        );
    }
    chart
}
