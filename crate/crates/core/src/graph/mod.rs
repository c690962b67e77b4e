//! Topology, hop-count shortest paths, betweenness and graph partitioning.

mod centrality;
mod network;
mod partition;
mod paths;

pub use centrality::{argmax_lowest, betweenness_centrality, betweenness_induced};
pub use network::{Edge, EdgeId, Link, NetworkGraph, NodeId};
pub use partition::{compute_partitions, compute_partitions_from, PartitionResult};
pub use paths::{all_pairs_shortest_paths, DistanceTables};
