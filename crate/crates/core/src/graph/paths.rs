use std::collections::VecDeque;

use super::{NetworkGraph, NodeId};
use crate::error::{Error, Result};

/// Hop distances and next hops for every ordered node pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTables {
    n: usize,
    dist: Vec<u32>,
    next: Vec<u32>,
}

impl DistanceTables {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, a: NodeId, b: NodeId) -> u32 {
        self.dist[a * self.n + b]
    }

    /// First node after `a` on the canonical shortest path towards `b`
    /// (`a` itself when `a == b`).
    #[inline]
    pub fn next_hop(&self, a: NodeId, b: NodeId) -> NodeId {
        self.next[a * self.n + b] as NodeId
    }

    /// Row of distances from `a` to every node.
    pub fn row(&self, a: NodeId) -> &[u32] {
        &self.dist[a * self.n..(a + 1) * self.n]
    }

    /// Canonical shortest path `a → b`, both endpoints included.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let mut path = Vec::with_capacity(self.dist(a, b) as usize + 1);
        self.extend_path(a, b, &mut path);
        path
    }

    /// Appends the path `a → b` to `walk`, skipping `a` when it is already
    /// the last node of `walk`.
    pub fn extend_path(&self, a: NodeId, b: NodeId, walk: &mut Vec<NodeId>) {
        if walk.last() != Some(&a) {
            walk.push(a);
        }
        let mut cur = a;
        while cur != b {
            cur = self.next_hop(cur, b);
            walk.push(cur);
        }
    }
}

/// Breadth-first search from every node. Among equally short continuations the
/// lowest-id neighbour is the next hop.
pub fn all_pairs_shortest_paths(g: &NetworkGraph) -> Result<DistanceTables> {
    let n = g.node_count();
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in g.neighbors(u) {
                if row[v] == u32::MAX {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        if row.contains(&u32::MAX) {
            return Err(Error::Disconnected);
        }
    }
    let mut next = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            next[a * n + b] = if a == b {
                a as u32
            } else {
                let want = dist[a * n + b] - 1;
                // links are symmetric, so dist[x][b] == dist[b][x]
                *g.neighbors(a)
                    .iter()
                    .find(|&&x| dist[b * n + x] == want)
                    .expect("BFS layer has a predecessor") as u32
            };
        }
    }
    Ok(DistanceTables { n, dist, next })
}
