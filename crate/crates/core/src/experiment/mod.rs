//! Declarative sweeps over seeds, sync rates, caps and solvers, with CSV and
//! SVG output.

pub mod asymptotic;
mod config;
mod runner;
pub mod stats;
pub mod svg;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, OutputConfig, TopologyConfig, TrafficKind};
pub use runner::{rows_from_csv, rows_to_csv, run_experiment, summarize, summary_to_csv, ResultRow, SummaryRow, CSV_HEADER, LOWER_BOUND};

use crate::error::Result;
use svg::LineChart;

/// Charts for a summary: objective and distinct count against the sync rate,
/// and per-flow traffic against the cap when several caps were swept.
pub fn summary_charts(summary: &[SummaryRow]) -> Vec<(&'static str, LineChart)> {
    let mut labels: Vec<&str> = Vec::new();
    for s in summary {
        if !labels.contains(&s.solver.as_str()) {
            labels.push(&s.solver);
        }
    }
    let series = |label: &str, f: &dyn Fn(&SummaryRow) -> f64| -> Vec<(f64, f64)> {
        summary.iter().filter(|s| s.solver == label).map(|s| (s.sync_rate, f(s))).collect()
    };
    let mut objective = LineChart::new("Total traffic", "sync rate", "objective");
    let mut distinct = LineChart::new("Distinct replicas", "sync rate", "distinct replicas");
    for &l in &labels {
        objective.push(l, series(l, &|s| s.objective_mean));
        if l != LOWER_BOUND {
            distinct.push(l, series(l, &|s| s.distinct_mean));
        }
    }
    let mut charts = vec![("objective_vs_sync", objective), ("distinct_vs_sync", distinct)];

    let capped: Vec<(&str, usize)> = labels
        .iter()
        .filter_map(|l| l.rsplit_once("-c").and_then(|(f, c)| Some((f, c.parse().ok()?))))
        .collect();
    let mut families: Vec<&str> = capped.iter().map(|p| p.0).collect();
    families.dedup();
    if capped.len() > families.len() {
        let mut chart = LineChart::new("Traffic per flow", "replicas C_s", "objective / flows");
        let mut rates: Vec<f64> = summary.iter().map(|s| s.sync_rate).collect();
        rates.dedup();
        for rate in rates {
            for fam in &families {
                let pts = summary
                    .iter()
                    .filter(|s| s.sync_rate == rate)
                    .filter_map(|s| {
                        let (f, c) = s.solver.rsplit_once("-c")?;
                        (f == *fam).then(|| Some((c.parse::<f64>().ok()?, s.per_flow_mean)))?
                    })
                    .collect();
                chart.push(format!("{fam} {rate}"), pts);
            }
        }
        charts.push(("per_flow_vs_cap", chart));
    }
    charts
}

/// Writes `<name>_raw.csv`, `<name>_summary.csv` and, when enabled, one SVG
/// per chart into `dir`. Returns the written paths.
pub fn write_outputs(cfg: &ExperimentConfig, rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let flows = cfg.instance(0)?.flows.len();
    let summary = summarize(rows, flows);
    let mut written = Vec::new();
    let mut put = |file: String, text: String| -> Result<()> {
        let p = dir.join(file);
        std::fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    put(format!("{}_raw.csv", cfg.name), rows_to_csv(rows)?)?;
    put(format!("{}_summary.csv", cfg.name), summary_to_csv(&summary)?)?;
    if cfg.output.charts {
        for (name, chart) in summary_charts(&summary) {
            put(format!("{}_{name}.svg", cfg.name), chart.render())?;
        }
    }
    Ok(written)
}
