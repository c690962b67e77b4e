use std::collections::HashSet;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{all_pairs_shortest_paths, argmax_lowest, betweenness_induced, DistanceTables, NetworkGraph, NodeId};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// Node → center of its partition.
    pub affiliation: Vec<NodeId>,
    /// Distinct centers, ascending.
    pub centers: Vec<NodeId>,
    pub iterations_used: usize,
    /// Whether the loop stopped because a center set recurred.
    pub converged: bool,
}

impl PartitionResult {
    /// Member lists, one per center, in the order of `centers`.
    pub fn partitions(&self) -> Vec<Vec<NodeId>> {
        self.centers
            .iter()
            .map(|&c| (0..self.affiliation.len()).filter(|&n| self.affiliation[n] == c).collect())
            .collect()
    }
}

/// Voronoi-style partitioning in hop distance with betweenness-central
/// leaders, started from `c` distinct random centers.
pub fn compute_partitions(g: &NetworkGraph, c: usize, max_iters: usize, rng_seed: u64) -> Result<PartitionResult> {
    let n = g.node_count();
    check_args(n, c, max_iters)?;
    let dt = all_pairs_shortest_paths(g)?;
    if c == 1 {
        let all: Vec<NodeId> = (0..n).collect();
        let center = argmax_lowest(&betweenness_induced(g, &all)).expect("non-empty graph");
        return Ok(PartitionResult { affiliation: vec![center; n], centers: vec![center], iterations_used: 0, converged: true });
    }
    let mut rng = rng::seeded(rng_seed);
    let initial = index::sample(&mut rng, n, c).into_vec();
    compute_partitions_from(g, &dt, &initial, max_iters)
}

/// Same loop as [`compute_partitions`] from explicit initial centers.
///
/// Each iteration affiliates every node with its nearest center (ties → lowest
/// center id) and then moves every center to the highest-betweenness node of
/// its partition's induced subgraph (ties → lowest node id). The loop stops
/// when the center set has been seen before or after `max_iters` iterations.
pub fn compute_partitions_from(
    g: &NetworkGraph,
    dt: &DistanceTables,
    initial_centers: &[NodeId],
    max_iters: usize,
) -> Result<PartitionResult> {
    let n = g.node_count();
    check_args(n, initial_centers.len(), max_iters)?;
    let mut current: Vec<NodeId> = initial_centers.to_vec();
    current.sort_unstable();
    if current.windows(2).any(|w| w[0] == w[1]) || current.last().is_some_and(|&x| x >= n) {
        return Err(Error::InvalidArgument("initial centers must be distinct node ids".into()));
    }

    let mut seen: HashSet<Vec<NodeId>> = HashSet::new();
    let mut affiliation = affiliate(dt, n, &current);
    let mut iterations = 0;
    while iterations < max_iters && !seen.contains(&current) {
        seen.insert(current.clone());
        let aff = affiliate(dt, n, &current);
        let mut relabel = vec![0; n];
        let mut next = Vec::with_capacity(current.len());
        for &center in &current {
            let members: Vec<NodeId> = (0..n).filter(|&v| aff[v] == center).collect();
            let leader = members[argmax_lowest(&betweenness_induced(g, &members)).expect("center is its own member")];
            relabel[center] = leader;
            next.push(leader);
        }
        affiliation = aff.iter().map(|&c| relabel[c]).collect();
        next.sort_unstable();
        current = next;
        iterations += 1;
    }
    let converged = seen.contains(&current);
    Ok(PartitionResult { affiliation, centers: current, iterations_used: iterations, converged })
}

fn check_args(n: usize, c: usize, max_iters: usize) -> Result<()> {
    if c == 0 {
        return Err(Error::InvalidArgument("partition count must be at least 1".into()));
    }
    if c > n {
        return Err(Error::TooManyPartitions { partitions: c, nodes: n });
    }
    if max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    Ok(())
}

fn affiliate(dt: &DistanceTables, n: usize, centers: &[NodeId]) -> Vec<NodeId> {
    (0..n)
        .map(|v| {
            let mut best = centers[0];
            for &c in &centers[1..] {
                if dt.dist(v, c) < dt.dist(v, best) {
                    best = c;
                }
            }
            best
        })
        .collect()
}
