//! Independent reference implementations and proptest generators shared by
//! the property and acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use stateplace::graph::{Link, NetworkGraph};
use stateplace::{FlowSpec, Scenario, StateSpec};

pub const DYADIC_DEMANDS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
pub const DYADIC_RATES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

/// Plain adjacency lists built from the link list.
pub fn adjacency(g: &NetworkGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![BTreeSet::new(); g.node_count()];
    for l in g.links() {
        adj[l.u].insert(l.v);
        adj[l.v].insert(l.u);
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

pub fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

pub fn all_distances(g: &NetworkGraph) -> Vec<Vec<usize>> {
    let adj = adjacency(g);
    (0..g.node_count()).map(|s| bfs(&adj, s)).collect()
}

/// Betweenness by listing every shortest path of every unordered pair.
pub fn betweenness_by_paths(g: &NetworkGraph) -> Vec<f64> {
    let adj = adjacency(g);
    let n = g.node_count();
    let d: Vec<Vec<usize>> = (0..n).map(|s| bfs(&adj, s)).collect();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths = Vec::new();
            let mut cur = vec![s];
            collect_paths(&adj, &d, t, &mut cur, &mut paths);
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / total;
                }
            }
        }
    }
    bc
}

fn collect_paths(adj: &[Vec<usize>], d: &[Vec<usize>], t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let u = *cur.last().unwrap();
    if u == t {
        out.push(cur.clone());
        return;
    }
    for &v in &adj[u] {
        if d[v][t] + 1 == d[u][t] {
            cur.push(v);
            collect_paths(adj, d, t, cur, out);
            cur.pop();
        }
    }
}

/// Non-empty subsets of `0..n` with at most `cap` elements.
pub fn small_subsets(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize <= cap {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Cost of a placement by trying every replica tuple of every flow.
pub fn brute_objective(s: &Scenario, d: &[Vec<usize>], hosts: &[Vec<usize>]) -> f64 {
    let mut data = 0.0;
    for f in &s.flows {
        let mut best = usize::MAX;
        let mut tuple = vec![0; f.states.len()];
        loop {
            let mut at = f.src;
            let mut len = 0;
            for (i, &st) in f.states.iter().enumerate() {
                let h = hosts[st][tuple[i]];
                len += d[at][h];
                at = h;
            }
            len += d[at][f.dst];
            best = best.min(len);
            // odometer over the tuple
            let mut i = 0;
            while i < tuple.len() {
                tuple[i] += 1;
                if tuple[i] < hosts[f.states[i]].len() {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
            if i == tuple.len() {
                break;
            }
        }
        data += f.demand * best as f64;
    }
    let mut sync = 0.0;
    for (st, spec) in s.states.iter().enumerate() {
        let mut pairs = 0;
        for &a in &hosts[st] {
            for &b in &hosts[st] {
                pairs += d[a][b];
            }
        }
        sync += spec.sync_rate * pairs as f64;
    }
    data + sync
}

/// Optimum over every combination of distinct host subsets within the caps.
pub fn brute_optimum(s: &Scenario, caps: &[usize]) -> f64 {
    let d = all_distances(&s.graph);
    let n = s.node_count();
    let options: Vec<Vec<Vec<usize>>> = caps.iter().map(|&c| small_subsets(n, c)).collect();
    let mut best = f64::INFINITY;
    let mut idx = vec![0; caps.len()];
    loop {
        let hosts: Vec<Vec<usize>> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        best = best.min(brute_objective(s, &d, &hosts));
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return best;
        }
    }
}

/// Connected graph: a random tree plus extra chords.
pub fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = NetworkGraph> {
    (min_n..=max_n).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<u32>(), n.saturating_sub(1));
        let extra = proptest::collection::vec((0..n, 0..n), 0..=n);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut set = BTreeSet::new();
            for (i, p) in parents.iter().enumerate() {
                let child = i + 1;
                set.insert(((*p as usize) % child, child));
            }
            for (a, b) in extra {
                if a != b {
                    set.insert((a.min(b), a.max(b)));
                }
            }
            let links = set.into_iter().map(|(u, v)| Link { u, v, capacity: f64::INFINITY }).collect();
            NetworkGraph::from_links(n, links).expect("tree plus chords is connected")
        })
    })
}

#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub max_nodes: usize,
    pub max_states: usize,
    pub max_cap: usize,
    /// Draw demands and sync rates from small dyadic sets so that every sum
    /// is exact; otherwise draw them from continuous ranges.
    pub dyadic: bool,
}

fn demand_strategy(dyadic: bool) -> BoxedStrategy<f64> {
    if dyadic {
        proptest::sample::select(DYADIC_DEMANDS.to_vec()).boxed()
    } else {
        (0.1f64..10.0).boxed()
    }
}

fn rate_strategy(dyadic: bool) -> BoxedStrategy<f64> {
    if dyadic {
        proptest::sample::select(DYADIC_RATES.to_vec()).boxed()
    } else {
        (0.0f64..4.0).boxed()
    }
}

pub fn scenario_strategy(p: ScenarioParams) -> impl Strategy<Value = Scenario> {
    let ScenarioParams { max_nodes, max_states, max_cap, dyadic } = p;
    (graph_strategy(2, max_nodes), 1..=max_states).prop_flat_map(move |(g, k)| {
        let n = g.node_count();
        let states = proptest::collection::vec((1..=max_cap.min(n), rate_strategy(dyadic)), k);
        let flow = (0..n, 1..n, demand_strategy(dyadic), proptest::collection::vec(0..k, 0..=k));
        let flows = proptest::collection::vec(flow, 1..=n);
        (Just(g), states, flows).prop_map(move |(g, states, flows)| {
            let states: Vec<StateSpec> = states
                .into_iter()
                .enumerate()
                .map(|(i, (cap, rate))| StateSpec { id: format!("s{i}"), max_replicas: cap, sync_rate: rate })
                .collect();
            let flows = flows
                .into_iter()
                .enumerate()
                .map(|(id, (src, off, demand, seq))| {
                    let mut seen = BTreeSet::new();
                    let seq: Vec<usize> = seq.into_iter().filter(|s| seen.insert(*s)).collect();
                    FlowSpec { id, src, dst: (src + off) % n, demand, states: seq }
                })
                .collect();
            Scenario::new(g, states, flows).expect("generated scenario is valid")
        })
    })
}

/// Host lists within each state's cap; duplicates allowed.
pub fn placement_for(s: &Scenario) -> impl Strategy<Value = Vec<Vec<usize>>> {
    let n = s.node_count();
    let per_state: Vec<_> =
        s.states.iter().map(|st| proptest::collection::vec(0..n, 1..=st.max_replicas)).collect();
    per_state
}

/// Walk length needed to visit one host of each state in order, found by
/// enumerating every walk up to `limit` hops. `None` if none is short enough.
pub fn shortest_walk_by_enumeration(adj: &[Vec<usize>], f: &FlowSpec, hosts: &[Vec<usize>], limit: usize) -> Option<usize> {
    fn matched(f: &FlowSpec, hosts: &[Vec<usize>], mut k: usize, node: usize) -> usize {
        while k < f.states.len() && hosts[f.states[k]].contains(&node) {
            k += 1;
        }
        k
    }
    fn dfs(adj: &[Vec<usize>], f: &FlowSpec, hosts: &[Vec<usize>], node: usize, k: usize, left: usize) -> bool {
        if k == f.states.len() && node == f.dst {
            return true;
        }
        if left == 0 {
            return false;
        }
        adj[node].iter().any(|&v| dfs(adj, f, hosts, v, matched(f, hosts, k, v), left - 1))
    }
    let k0 = matched(f, hosts, 0, f.src);
    (0..=limit).find(|&len| dfs(adj, f, hosts, f.src, k0, len))
}
