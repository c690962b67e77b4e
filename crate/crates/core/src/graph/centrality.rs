use std::collections::VecDeque;

use super::{NetworkGraph, NodeId};

/// Shortest-path betweenness on the undirected view, endpoints excluded,
/// each unordered pair counted once.
pub fn betweenness_centrality(g: &NetworkGraph) -> Vec<f64> {
    let all: Vec<NodeId> = (0..g.node_count()).collect();
    betweenness_induced(g, &all)
}

/// Brandes' accumulation restricted to the subgraph induced by `members`.
///
/// The result is indexed like `members`. Pairs that are disconnected inside
/// the induced subgraph contribute nothing.
pub fn betweenness_induced(g: &NetworkGraph, members: &[NodeId]) -> Vec<f64> {
    let k = members.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &n) in members.iter().enumerate() {
        local[n] = i;
    }
    let adj: Vec<Vec<usize>> = members
        .iter()
        .map(|&n| g.neighbors(n).iter().filter_map(|&m| (local[m] != usize::MAX).then_some(local[m])).collect())
        .collect();

    let mut score = vec![0.0; k];
    let mut sigma = vec![0.0f64; k];
    let mut dist = vec![usize::MAX; k];
    let mut delta = vec![0.0f64; k];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut order = Vec::with_capacity(k);
    let mut queue = VecDeque::with_capacity(k);

    for s in 0..k {
        for i in 0..k {
            sigma[i] = 0.0;
            dist[i] = usize::MAX;
            delta[i] = 0.0;
            preds[i].clear();
        }
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    // every unordered pair was accumulated from both ends
    score.iter_mut().for_each(|x| *x /= 2.0);
    score
}

/// Index of the largest score, preferring the lowest index among values equal
/// up to floating-point accumulation noise.
pub fn argmax_lowest(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in scores.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) => {
                let cur = scores[b];
                if x > cur + 1e-9 * cur.abs().max(1.0) {
                    best = Some(i);
                }
            }
        }
    }
    best
}
