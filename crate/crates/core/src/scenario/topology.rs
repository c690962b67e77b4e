use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Link, NetworkGraph, NodeId};
use crate::rng;

/// `rows × cols` grid without wraparound; node `(r, c)` has id `r·cols + c`.
pub fn gen_manhattan(rows: usize, cols: usize, capacity: f64) -> Result<NetworkGraph> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidArgument(format!("grid {rows}x{cols} needs at least two nodes")));
    }
    let mut links = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                links.push(Link { u: id, v: id + 1, capacity });
            }
            if r + 1 < rows {
                links.push(Link { u: id, v: id + cols, capacity });
            }
        }
    }
    NetworkGraph::from_links(rows * cols, links)
}

#[derive(Debug, Clone)]
pub struct WattsStrogatz {
    pub graph: NetworkGraph,
    /// Generation attempts until a connected graph came out (1 = first try).
    pub attempts: u32,
    /// Seed of the successful attempt.
    pub seed_used: u64,
    /// Rewiring draws that fired in the successful attempt.
    pub rewired: usize,
}

const MAX_WS_ATTEMPTS: u32 = 1000;

pub fn gen_watts_strogatz(n: usize, k: usize, p: f64, rng_seed: u64) -> Result<NetworkGraph> {
    gen_watts_strogatz_detailed(n, k, p, rng_seed).map(|ws| ws.graph)
}

/// Small-world graph, node-local rewiring variant.
///
/// Starts from a ring where every node links to its `k/2` nearest neighbours
/// on each side. Then every node `i`, with probability `p`, replaces its link to
/// `i+1` by a link to a uniformly random node it is not yet adjacent to.
/// Disconnected outcomes are regenerated from `rng::mix(seed, attempt)`.
pub fn gen_watts_strogatz_detailed(n: usize, k: usize, p: f64, rng_seed: u64) -> Result<WattsStrogatz> {
    if k < 2 || k % 2 != 0 || n <= k {
        return Err(Error::InvalidArgument(format!("watts-strogatz needs n > k >= 2 with k even (n={n}, k={k})")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("rewiring probability {p} outside [0, 1]")));
    }
    for attempt in 0..MAX_WS_ATTEMPTS {
        let seed = if attempt == 0 { rng_seed } else { rng::mix(rng_seed, attempt as u64) };
        let (links, rewired) = rewired_ring(n, k, p, seed);
        match NetworkGraph::from_links(n, links) {
            Ok(graph) => return Ok(WattsStrogatz { graph, attempts: attempt + 1, seed_used: seed, rewired }),
            Err(Error::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidArgument(format!("no connected watts-strogatz graph after {MAX_WS_ATTEMPTS} attempts")))
}

fn rewired_ring(n: usize, k: usize, p: f64, seed: u64) -> (Vec<Link>, usize) {
    let mut rng = rng::seeded(seed);
    let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let v = (i + j) % n;
            adj[i].insert(v);
            adj[v].insert(i);
        }
    }
    let mut rewired = 0;
    for i in 0..n {
        if !rng.gen_bool(p) {
            continue;
        }
        rewired += 1;
        let clockwise = (i + 1) % n;
        if !adj[i].contains(&clockwise) {
            continue;
        }
        let candidates: Vec<NodeId> = (0..n).filter(|&w| w != i && !adj[i].contains(&w)).collect();
        if candidates.is_empty() {
            continue;
        }
        let w = candidates[rng.gen_range(0..candidates.len())];
        adj[i].remove(&clockwise);
        adj[clockwise].remove(&i);
        adj[i].insert(w);
        adj[w].insert(i);
    }
    let links = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| Link { u, v, capacity: f64::INFINITY }))
        .collect();
    (links, rewired)
}
