use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// An undirected link as given by the user. Expanded into two directed edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub u: NodeId,
    pub v: NodeId,
    #[serde(with = "crate::scenario::capacity_serde")]
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: f64,
}

/// Directed multigraph where every link is present in both directions.
///
/// Link `i` is stored as edges `2i` (u→v) and `2i+1` (v→u).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    node_count: usize,
    links: Vec<Link>,
    edges: Vec<Edge>,
    // out-edges per node, sorted by (head, edge id)
    out: Vec<Vec<(NodeId, EdgeId)>>,
    // distinct neighbors per node, ascending
    neighbors: Vec<Vec<NodeId>>,
}

impl NetworkGraph {
    /// Builds the graph from undirected links, rejecting self-loops,
    /// out-of-range endpoints, non-positive capacities and disconnected inputs.
    pub fn from_links(node_count: usize, links: Vec<Link>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut edges = Vec::with_capacity(links.len() * 2);
        let mut out = vec![Vec::new(); node_count];
        for (i, link) in links.iter().enumerate() {
            if link.u >= node_count || link.v >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "link {i} ({}, {}) references a node outside 0..{node_count}",
                    link.u, link.v
                )));
            }
            if link.u == link.v {
                return Err(Error::InvalidGraph(format!("link {i} is a self-loop on node {}", link.u)));
            }
            if !(link.capacity > 0.0) {
                return Err(Error::InvalidGraph(format!("link {i} has non-positive capacity")));
            }
            for (from, to) in [(link.u, link.v), (link.v, link.u)] {
                out[from].push((to, edges.len()));
                edges.push(Edge { from, to, capacity: link.capacity });
            }
        }
        let mut neighbors = Vec::with_capacity(node_count);
        for adj in &mut out {
            adj.sort_unstable();
            let mut ns: Vec<NodeId> = adj.iter().map(|&(n, _)| n).collect();
            ns.dedup();
            neighbors.push(ns);
        }
        let g = Self { node_count, links, edges, out, neighbors };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.neighbors[n]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.neighbors[n].len()
    }

    /// Lowest-id directed edge from `u` to `v`, if adjacent.
    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let adj = &self.out[u];
        let i = adj.partition_point(|&(n, _)| n < v);
        adj.get(i).filter(|&&(n, _)| n == v).map(|&(_, e)| e)
    }

    pub fn are_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(n) = stack.pop() {
            for &m in &self.neighbors[n] {
                if !seen[m] {
                    seen[m] = true;
                    reached += 1;
                    stack.push(m);
                }
            }
        }
        reached == self.node_count
    }
}
