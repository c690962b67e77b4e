//! Unit-square model of an unwrapped Manhattan network.
//!
//! Replicas sit at fixed points of the unit square, flows join two uniform
//! random points through the replica nearer to one of them, and replicas
//! synchronize pairwise. Expected distances come from Monte Carlo sampling and
//! feed a closed-form total-traffic expression whose minimiser is the optimal
//! replica count.

mod cache;
mod model;
mod montecarlo;
mod positions;

pub use cache::DistanceCache;
pub use model::{
    approx_optimal_replicas, default_c_max, fit_power_law, optimal_replicas_from, optimal_replicas_search, total_traffic,
    AsymptoticFit, FitPoint,
};
pub use montecarlo::{mc_distances, pairwise_mean_distance, DistanceEstimate};
pub use positions::{replica_positions, replica_positions_seeded, NearestReplica, Point, LLOYD_SAMPLES};

/// Default sample count for Monte Carlo estimates.
pub const DEFAULT_SAMPLES: usize = 1_000_000;
