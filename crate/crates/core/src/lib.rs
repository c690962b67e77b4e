//! Placement of replicated state variables in stateful SDN data planes.
//!
//! The crate computes where to put the replicas of each network-wide state so
//! that data traffic (which must visit a replica of every state it needs, in
//! order) plus replica synchronization traffic is as small as possible.
//!
//! * [`graph`]: topology, hop distances, betweenness, Voronoi-style partitions.
//! * [`scenario`]: generators for grids, small-world graphs and traffic matrices.
//! * [`evaluator`]: the single definition of routing and traffic accounting.
//! * [`exact`]: exhaustive optimum for small instances.
//! * [`pmr`]: partition + betweenness + local-search heuristic.
//! * [`asymptotic`]: unit-square model of the optimal replica count.
//! * [`solver`]: name-based registry of placement strategies.
//! * [`experiment`]: seeded sweeps, CSV/SVG output.

pub mod asymptotic;
pub mod error;
pub mod evaluator;
pub mod exact;
pub mod experiment;
pub mod graph;
pub mod pmr;
pub mod rng;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
pub use evaluator::{Placement, TrafficReport};
pub use graph::{DistanceTables, NetworkGraph, NodeId};
pub use scenario::{FlowSpec, Scenario, StateSpec};
