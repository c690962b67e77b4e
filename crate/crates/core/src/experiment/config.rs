use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::pmr::PmrConfig;
use crate::scenario::{gen_clustered_traffic, gen_manhattan, gen_uniform_traffic, gen_watts_strogatz, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologyConfig {
    Manhattan {
        rows: usize,
        cols: usize,
        #[serde(default = "infinite", with = "crate::scenario::capacity_serde")]
        capacity: f64,
    },
    #[serde(alias = "ws")]
    WattsStrogatz {
        n: usize,
        k: usize,
        p: f64,
        #[serde(default = "infinite", with = "crate::scenario::capacity_serde")]
        capacity: f64,
    },
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl TopologyConfig {
    pub fn label(&self) -> String {
        match self {
            TopologyConfig::Manhattan { rows, cols, .. } => format!("manhattan-{rows}x{cols}"),
            TopologyConfig::WattsStrogatz { n, k, p, .. } => format!("ws-{n}-k{k}-p{p}"),
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            TopologyConfig::Manhattan { rows, cols, .. } => rows * cols,
            TopologyConfig::WattsStrogatz { n, .. } => n,
        }
    }

    /// Grids ignore the seed; small-world graphs are redrawn per seed.
    pub fn build(&self, seed: u64) -> Result<NetworkGraph> {
        match *self {
            TopologyConfig::Manhattan { rows, cols, capacity } => gen_manhattan(rows, cols, capacity),
            TopologyConfig::WattsStrogatz { n, k, p, capacity } => {
                let g = gen_watts_strogatz(n, k, p, seed)?;
                if capacity.is_finite() {
                    let links = g.links().iter().map(|l| crate::graph::Link { capacity, ..*l }).collect();
                    NetworkGraph::from_links(n, links)
                } else {
                    Ok(g)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficKind {
    #[default]
    Uniform,
    Clustered,
}

impl TrafficKind {
    pub fn label(self) -> &'static str {
        match self {
            TrafficKind::Uniform => "uniform",
            TrafficKind::Clustered => "clustered",
        }
    }

    pub fn build(self, g: &NetworkGraph, demand: f64, seed: u64) -> Result<Vec<crate::scenario::FlowSpec>> {
        match self {
            TrafficKind::Uniform => gen_uniform_traffic(g, demand, &[0], seed),
            TrafficKind::Clustered => gen_clustered_traffic(g, demand, &[0], seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for CSV and SVG files; the CLI `--out` flag overrides it.
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "yes")]
    pub charts: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), charts: true }
    }
}

fn default_dir() -> String {
    "results".into()
}

fn yes() -> bool {
    true
}

fn unit() -> f64 {
    1.0
}

/// A seed × sync-rate × cap × solver sweep on one single-state setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub topology: TopologyConfig,
    #[serde(default)]
    pub traffic: TrafficKind,
    #[serde(default = "unit")]
    pub demand: f64,
    pub sync_rates: Vec<f64>,
    /// Replica caps C_s; for `pmr` this is the number of replicas placed.
    pub caps: Vec<usize>,
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub solvers: Vec<String>,
    #[serde(default = "yes")]
    pub lower_bound: bool,
    #[serde(default)]
    pub pmr: PmrConfig,
    #[serde(default)]
    pub exact_budget: Option<u128>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.seeds == 0 {
            return bad("seed count must be at least 1".into());
        }
        if self.sync_rates.is_empty() || self.sync_rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad(format!("sync rates must be non-negative and non-empty: {:?}", self.sync_rates));
        }
        let n = self.topology.node_count();
        if self.caps.is_empty() || self.caps.iter().any(|&c| c == 0 || c > n) {
            return bad(format!("caps must lie in 1..={n}: {:?}", self.caps));
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected".into());
        }
        if !(self.demand.is_finite() && self.demand > 0.0) {
            return bad(format!("demand must be positive: {}", self.demand));
        }
        Ok(())
    }

    /// Scenario for seed index `i`, before the sync rate and cap are applied.
    pub fn instance(&self, i: usize) -> Result<Scenario> {
        let seed = self.instance_seed(i);
        let g = self.topology.build(crate::rng::mix(seed, 1))?;
        let flows = self.traffic.build(&g, self.demand, crate::rng::mix(seed, 2))?;
        let cap = *self.caps.iter().max().unwrap_or(&1);
        Scenario::single_state(g, flows, cap, self.sync_rates[0])
    }

    pub fn instance_seed(&self, i: usize) -> u64 {
        crate::rng::mix(self.base_seed, i as u64)
    }
}
