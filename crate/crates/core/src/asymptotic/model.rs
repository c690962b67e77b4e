use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{DistanceCache, DistanceEstimate};
use crate::error::{Error, Result};

/// Total traffic of an `n`-node grid with `c` replicas:
/// `√n · β · (λ_f · n · d_data + λ̂_s · d_sync · c(c−1))`.
pub fn total_traffic(n: usize, c: usize, flow_rate: f64, sync_rate: f64, beta: f64, d_data: f64, d_sync: f64) -> f64 {
    let n = n as f64;
    let c = c as f64;
    n.sqrt() * beta * (flow_rate * n * d_data + sync_rate * d_sync * c * (c - 1.0))
}

/// Default search bound `⌈2√n⌉`.
pub fn default_c_max(n: usize) -> usize {
    ((2.0 * (n as f64).sqrt()).ceil() as usize).max(1)
}

/// Replica count in `1..=c_max` minimising [`total_traffic`], smallest on ties.
///
/// Scans every count rather than bisecting, because nothing guarantees the
/// cost is unimodal in `c`. β is fixed to 1 since it scales every candidate
/// alike.
pub fn optimal_replicas_search(n: usize, flow_rate: f64, sync_rate: f64, c_max: usize, samples: usize, rng_seed: u64) -> Result<usize> {
    let mut cache = DistanceCache::default();
    let curve = cache.curve(c_max, samples, rng_seed)?;
    optimal_replicas_from(n, flow_rate, sync_rate, &curve)
}

/// Same as [`optimal_replicas_search`] over precomputed estimates for
/// `c = 1, 2, …` (the scan covers every entry).
pub fn optimal_replicas_from(n: usize, flow_rate: f64, sync_rate: f64, curve: &[DistanceEstimate]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for est in curve {
        let t = total_traffic(n, est.c, flow_rate, sync_rate, 1.0, est.d_data, est.d_sync);
        if best.is_none_or(|(_, b)| t < b) {
            best = Some((est.c, t));
        }
    }
    best.map(|(c, _)| c).ok_or_else(|| Error::InvalidArgument("c_max must be at least 1".into()))
}

/// Closed-form approximation `⌈0.47 · n^0.4 · (λ_f/λ̂_s)^0.4⌉`.
pub fn approx_optimal_replicas(n: usize, flow_rate: f64, sync_rate: f64) -> Result<usize> {
    if sync_rate == 0.0 {
        return Err(Error::ZeroSyncRate);
    }
    if n < 1 || !(flow_rate > 0.0) || !(sync_rate > 0.0) {
        return Err(Error::InvalidArgument("n >= 1 and positive rates are required".into()));
    }
    Ok((0.47 * (n as f64).powf(0.4) * (flow_rate / sync_rate).powf(0.4)).ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: usize,
    /// λ̂_s / λ_f
    pub ratio: f64,
    pub c_opt: usize,
}

/// Least-squares parameters of `log10 C = x + y·log10 N + z·log10(λ̂_s/λ_f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub residual_norm: f64,
}

impl AsymptoticFit {
    pub fn coefficient(&self) -> f64 {
        10f64.powf(self.x)
    }

    pub fn predict(&self, n: usize, ratio: f64) -> f64 {
        10f64.powf(self.x + self.y * (n as f64).log10() + self.z * ratio.log10())
    }
}

pub fn fit_power_law(points: &[FitPoint]) -> Result<AsymptoticFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} points, need at least 3", points.len())));
    }
    if let Some(p) = points.iter().find(|p| p.c_opt < 1 || p.n < 1 || !(p.ratio > 0.0)) {
        return Err(Error::DegenerateFit(format!("invalid point {p:?}")));
    }
    let m = points.len();
    let a = DMatrix::from_fn(m, 3, |i, j| match j {
        0 => 1.0,
        1 => (points[i].n as f64).log10(),
        _ => points[i].ratio.log10(),
    });
    let b = DVector::from_iterator(m, points.iter().map(|p| (p.c_opt as f64).log10()));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax.max(1.0)) {
        return Err(Error::DegenerateFit("design matrix is rank deficient".into()));
    }
    let sol = svd.solve(&b, 1e-12).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let residual = &b - &a * &sol;
    Ok(AsymptoticFit { x: sol[0], y: sol[1], z: sol[2], residual_norm: residual.norm() })
}
