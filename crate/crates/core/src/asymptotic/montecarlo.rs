use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::positions::{dist, replica_positions, NearestReplica, Point};
use crate::error::{Error, Result};
use crate::rng;

const BATCH: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub c: usize,
    /// Mean routed distance via the replica nearest to one endpoint.
    pub d_data: f64,
    /// Mean distance over unordered pairs of replica positions (0 for c = 1).
    pub d_sync: f64,
    /// Standard error of `d_data`.
    pub std_err: f64,
    pub samples: usize,
}

/// Exact mean Euclidean distance over unordered pairs of points.
pub fn pairwise_mean_distance(points: &[Point]) -> f64 {
    let c = points.len();
    if c < 2 {
        return 0.0;
    }
    let total: f64 = points.iter().enumerate().map(|(i, &a)| points[i + 1..].iter().map(|&b| dist(a, b)).sum::<f64>()).sum();
    total / (c * (c - 1) / 2) as f64
}

/// Estimates both expected distances for `c` replicas.
///
/// For each uniform pair `(P_src, P_dst)` the endpoint closer to its nearest
/// replica `R*` is routed to `R*` and from there to the other endpoint.
/// Samples are drawn in fixed-size batches, each from its own derived stream,
/// and summed in batch order so the result does not depend on threading.
pub fn mc_distances(c: usize, samples: usize, rng_seed: u64) -> Result<DistanceEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one Monte Carlo sample is required".into()));
    }
    let positions = replica_positions(c)?;
    let index = NearestReplica::new(&positions);
    let batches = samples.div_ceil(BATCH);
    let partial: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::derived(rng_seed, b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..count {
                let src = [rng.gen::<f64>(), rng.gen::<f64>()];
                let dst = [rng.gen::<f64>(), rng.gen::<f64>()];
                let (rs, ds) = index.nearest(src);
                let (rd, dd) = index.nearest(dst);
                let d = if ds <= dd { ds + dist(positions[rs], dst) } else { dd + dist(positions[rd], src) };
                sum += d;
                sq += d * d;
            }
            (sum, sq)
        })
        .collect();
    let (sum, sq) = partial.iter().fold((0.0, 0.0), |(a, b), &(s, q)| (a + s, b + q));
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(DistanceEstimate { c, d_data: mean, d_sync: pairwise_mean_distance(&positions), std_err: (var / n).sqrt(), samples })
}
