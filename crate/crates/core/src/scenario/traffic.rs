use rand::seq::SliceRandom;

use super::FlowSpec;
use crate::error::{Error, Result};
use crate::graph::{NetworkGraph, NodeId};
use crate::rng::{self, Rng};

/// One flow per node towards a uniformly random fixed-point-free permutation.
pub fn gen_uniform_traffic(g: &NetworkGraph, demand: f64, state_sequence: &[usize], rng_seed: u64) -> Result<Vec<FlowSpec>> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidArgument("uniform traffic needs at least two nodes".into()));
    }
    let mut rng = rng::seeded(rng_seed);
    let nodes: Vec<NodeId> = (0..n).collect();
    let dst = derangement(&nodes, &mut rng);
    Ok(flows(&nodes, &dst, demand, state_sequence))
}

/// Permutation traffic inside each half `{0..⌊N/2⌋-1}` and `{⌊N/2⌋..N-1}`.
pub fn gen_clustered_traffic(g: &NetworkGraph, demand: f64, state_sequence: &[usize], rng_seed: u64) -> Result<Vec<FlowSpec>> {
    let n = g.node_count();
    if n < 4 {
        return Err(Error::InvalidArgument("clustered traffic needs at least four nodes".into()));
    }
    let mut rng = rng::seeded(rng_seed);
    let (low, high): (Vec<NodeId>, Vec<NodeId>) = ((0..n / 2).collect(), (n / 2..n).collect());
    let mut dst = derangement(&low, &mut rng);
    dst.extend(derangement(&high, &mut rng));
    let src: Vec<NodeId> = (0..n).collect();
    Ok(flows(&src, &dst, demand, state_sequence))
}

// Uniform over derangements: reshuffle until no element stays in place.
fn derangement(items: &[NodeId], rng: &mut Rng) -> Vec<NodeId> {
    let mut perm = items.to_vec();
    loop {
        perm.shuffle(rng);
        if perm.iter().zip(items).all(|(a, b)| a != b) {
            return perm;
        }
    }
}

fn flows(src: &[NodeId], dst: &[NodeId], demand: f64, states: &[usize]) -> Vec<FlowSpec> {
    src.iter()
        .zip(dst)
        .enumerate()
        .map(|(id, (&src, &dst))| FlowSpec { id, src, dst, demand, states: states.to_vec() })
        .collect()
}
