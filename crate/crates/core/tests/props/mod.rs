//! Invariant suites, each run for `CASES` random cases. Shared between the
//! `properties` target (one test per suite) and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use crate::common::*;
use stateplace::asymptotic::{default_c_max, optimal_replicas_from, total_traffic, DistanceEstimate, DistanceCache};
use stateplace::evaluator::{route_flow_sequence, sync_cost, Evaluator};
use stateplace::exact::{default_caps, solve_exact};
use stateplace::experiment::stats::mean_ci;
use stateplace::experiment::{run_experiment, ExperimentConfig};
use stateplace::graph::{all_pairs_shortest_paths, argmax_lowest, betweenness_centrality, betweenness_induced, compute_partitions};
use stateplace::pmr::{place_multi_replicas, PmrConfig};
use stateplace::scenario::{gen_clustered_traffic, gen_manhattan, gen_uniform_traffic, gen_watts_strogatz, gen_watts_strogatz_detailed};
use stateplace::solver::{SolveRequest, SolverRegistry};
use stateplace::{Placement, Scenario};

pub const CASES: u32 = 1000;

type Outcome = Result<(), TestCaseError>;

fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Outcome) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const ALL: &[Suite] = &[
    ("apsp_symmetric_and_consistent", apsp_symmetric_and_consistent),
    ("betweenness_matches_path_oracle", betweenness_matches_path_oracle),
    ("partitions_terminate_with_central_centers", partitions_terminate_with_central_centers),
    ("traffic_generators_shape", traffic_generators_shape),
    ("watts_strogatz_edge_count", watts_strogatz_edge_count),
    ("generators_deterministic", generators_deterministic),
    ("load_and_hop_accounting_agree", load_and_hop_accounting_agree),
    ("adding_replica_is_monotone", adding_replica_is_monotone),
    ("single_replica_hop_formula", single_replica_hop_formula),
    ("objective_scales_linearly", objective_scales_linearly),
    ("routes_match_walk_enumeration", routes_match_walk_enumeration),
    ("exact_matches_brute_force", exact_matches_brute_force),
    ("exact_monotone_in_cap", exact_monotone_in_cap),
    ("snap_baseline_consistency", snap_baseline_consistency),
    ("pmr_anytime", pmr_anytime),
    ("pmr_bounded_by_exact", pmr_bounded_by_exact),
    ("pmr_deterministic", pmr_deterministic),
    ("beta_does_not_move_argmin", beta_does_not_move_argmin),
    ("grid_hops_within_embedding_bounds", grid_hops_within_embedding_bounds),
    ("search_monotone_in_n_and_ratio", search_monotone_in_n_and_ratio),
    ("experiment_rows_consistent", experiment_rows_consistent),
    ("ci_shrinks_with_root_seeds", ci_shrinks_with_root_seeds),
];

fn small(max_nodes: usize, max_states: usize, max_cap: usize) -> impl Strategy<Value = Scenario> {
    scenario_strategy(ScenarioParams { max_nodes, max_states, max_cap, dyadic: true })
}

fn with_placement(s: impl Strategy<Value = Scenario>) -> impl Strategy<Value = (Scenario, Vec<Vec<usize>>)> {
    s.prop_flat_map(|s| {
        let p = placement_for(&s);
        (Just(s), p)
    })
}

// graph

pub fn apsp_symmetric_and_consistent() -> Result<(), String> {
    check(graph_strategy(1, 14), |g| {
        let dt = all_pairs_shortest_paths(&g).unwrap();
        let oracle = all_distances(&g);
        let n = g.node_count();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(dt.dist(a, b) as usize, oracle[a][b]);
                prop_assert_eq!(dt.dist(a, b), dt.dist(b, a));
                let path = dt.path(a, b);
                prop_assert_eq!(path.len(), oracle[a][b] + 1);
                prop_assert!(path.windows(2).all(|w| g.are_adjacent(w[0], w[1])));
                for c in 0..n {
                    prop_assert!(dt.dist(a, c) <= dt.dist(a, b) + dt.dist(b, c));
                }
            }
        }
        Ok(())
    })
}

pub fn betweenness_matches_path_oracle() -> Result<(), String> {
    check(graph_strategy(1, 8), |g| {
        let got = betweenness_centrality(&g);
        let want = betweenness_by_paths(&g);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{got:?} vs {want:?}");
        }
        Ok(())
    })
}

pub fn partitions_terminate_with_central_centers() -> Result<(), String> {
    let s = graph_strategy(1, 14).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), 1..=n, 1usize..12, any::<u64>())
    });
    check(s, |(g, c, iters, seed)| {
        let r = compute_partitions(&g, c, iters, seed).unwrap();
        prop_assert!(r.iterations_used <= iters);
        prop_assert_eq!(r.centers.len(), c);
        prop_assert_eq!(r.centers.iter().collect::<BTreeSet<_>>().len(), c);
        let parts = r.partitions();
        prop_assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), g.node_count());
        for (center, members) in r.centers.iter().zip(&parts) {
            prop_assert!(members.contains(center));
            let bc = betweenness_induced(&g, members);
            let idx = members.iter().position(|m| m == center).unwrap();
            let best = bc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(bc[idx] >= best - 1e-9 * best.max(1.0));
            let top = argmax_lowest(&bc).unwrap();
            prop_assert_eq!(idx, top);
        }
        if r.converged {
            let dt = all_pairs_shortest_paths(&g).unwrap();
            for (v, &a) in r.affiliation.iter().enumerate() {
                let nearest = r.centers.iter().map(|&x| dt.dist(v, x)).min().unwrap();
                prop_assert_eq!(dt.dist(v, a), nearest);
            }
        }
        prop_assert_eq!(compute_partitions(&g, c, iters, seed).unwrap(), r);
        Ok(())
    })
}

// scenario generators

pub fn traffic_generators_shape() -> Result<(), String> {
    check((graph_strategy(2, 30), any::<u64>()), |(g, seed)| {
        let n = g.node_count();
        for clustered in [false, true] {
            let flows = if clustered {
                gen_clustered_traffic(&g, 1.0, &[0], seed)
            } else {
                gen_uniform_traffic(&g, 1.0, &[0], seed)
            };
            let flows = match flows {
                Ok(f) => f,
                // A half with a single node cannot host a derangement.
                Err(_) if clustered && n < 4 => continue,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            prop_assert_eq!(flows.len(), n);
            let srcs: BTreeSet<usize> = flows.iter().map(|f| f.src).collect();
            let dsts: BTreeSet<usize> = flows.iter().map(|f| f.dst).collect();
            prop_assert_eq!(srcs.len(), n);
            prop_assert_eq!(dsts.len(), n);
            for f in &flows {
                prop_assert_ne!(f.src, f.dst);
                prop_assert_eq!(&f.states, &vec![0]);
                if clustered {
                    prop_assert_eq!(f.src < n / 2, f.dst < n / 2);
                }
            }
        }
        Ok(())
    })
}

pub fn watts_strogatz_edge_count() -> Result<(), String> {
    let s = (10usize..60, 1usize..=4, 0.0f64..=1.0, any::<u64>());
    check(s, |(n, half_k, p, seed)| {
        let k = 2 * half_k;
        let ws = gen_watts_strogatz_detailed(n, k, p, seed).unwrap();
        prop_assert_eq!(ws.graph.links().len(), n * k / 2);
        let degree_sum: usize = (0..n).map(|v| ws.graph.degree(v)).sum();
        prop_assert_eq!(degree_sum, n * k);
        let pairs: BTreeSet<(usize, usize)> = ws.graph.links().iter().map(|l| (l.u.min(l.v), l.u.max(l.v))).collect();
        prop_assert_eq!(pairs.len(), n * k / 2);
        Ok(())
    })
}

pub fn generators_deterministic() -> Result<(), String> {
    let s = (2usize..8, 2usize..8, 0.0f64..=1.0, any::<u64>());
    check(s, |(rows, cols, p, seed)| {
        let m = gen_manhattan(rows, cols, f64::INFINITY).unwrap();
        prop_assert_eq!(m.links().len(), rows * (cols - 1) + cols * (rows - 1));
        prop_assert_eq!(&m, &gen_manhattan(rows, cols, f64::INFINITY).unwrap());
        let n = rows * cols;
        prop_assert_eq!(gen_uniform_traffic(&m, 1.0, &[0], seed).unwrap(), gen_uniform_traffic(&m, 1.0, &[0], seed).unwrap());
        if n >= 4 {
            prop_assert_eq!(
                gen_clustered_traffic(&m, 1.0, &[0], seed).unwrap(),
                gen_clustered_traffic(&m, 1.0, &[0], seed).unwrap()
            );
        }
        let ws_n = n.max(10);
        prop_assert_eq!(gen_watts_strogatz(ws_n, 4, p, seed).unwrap(), gen_watts_strogatz(ws_n, 4, p, seed).unwrap());
        Ok(())
    })
}

// evaluator

pub fn load_and_hop_accounting_agree() -> Result<(), String> {
    check(with_placement(small(8, 2, 3)), |(s, hosts)| {
        let ev = Evaluator::new(&s).unwrap();
        let p = Placement::new(hosts);
        let (_, r) = match ev.evaluate(&p) {
            Ok(v) => v,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let by_edges: f64 = r.per_edge_load.iter().sum();
        prop_assert_eq!(by_edges, r.objective_total);
        prop_assert_eq!(r.objective_total, r.data_total + r.sync_total);
        let fast = ev.objective(&p).unwrap();
        prop_assert_eq!(fast.data, r.data_total);
        prop_assert_eq!(fast.sync, r.sync_total);
        prop_assert!(r.capacity_feasible);
        prop_assert!(ev.lower_bound() <= r.objective_total);
        Ok(())
    })
}

pub fn adding_replica_is_monotone() -> Result<(), String> {
    let s = with_placement(small(8, 2, 3)).prop_flat_map(|(s, hosts)| {
        let n = s.node_count();
        let k = s.states.len();
        (Just(s), Just(hosts), 0..k, 0..n)
    });
    check(s, |(s, hosts, st, v)| {
        prop_assume!(!hosts[st].contains(&v));
        let ev = Evaluator::new(&s).unwrap();
        let before = ev.objective(&Placement::new(hosts.clone())).unwrap();
        let mut more = hosts;
        more[st].push(v);
        let after = ev.objective(&Placement::new(more)).unwrap();
        prop_assert!(after.data <= before.data);
        prop_assert!(after.sync >= before.sync);
        Ok(())
    })
}

pub fn single_replica_hop_formula() -> Result<(), String> {
    let s = small(10, 1, 1).prop_flat_map(|s| {
        let n = s.node_count();
        (Just(s), 0..n)
    });
    check(s, |(s, r)| {
        let ev = Evaluator::new(&s).unwrap();
        let d = all_distances(&s.graph);
        let (sol, _) = ev.evaluate(&Placement::single(vec![r])).unwrap();
        for (f, route) in s.flows.iter().zip(&sol.flows) {
            let want = if f.states.is_empty() { d[f.src][f.dst] } else { d[f.src][r] + d[r][f.dst] };
            prop_assert_eq!(route.hops as usize, want);
        }
        Ok(())
    })
}

pub fn objective_scales_linearly() -> Result<(), String> {
    let s = (with_placement(small(8, 2, 3)), proptest::sample::select(vec![0.5, 2.0, 3.0, 4.0]));
    check(s, |((s, hosts), factor)| {
        let p = Placement::new(hosts);
        let base = Evaluator::new(&s).unwrap().evaluate(&p).unwrap().1;
        let mut scaled = s.clone();
        for f in &mut scaled.flows {
            f.demand *= factor;
        }
        for st in &mut scaled.states {
            st.sync_rate *= factor;
        }
        let r = Evaluator::new(&scaled).unwrap().evaluate(&p).unwrap().1;
        prop_assert_eq!(r.objective_total, base.objective_total * factor);
        prop_assert_eq!(r.max_link_load, base.max_link_load * factor);
        Ok(())
    })
}

pub fn routes_match_walk_enumeration() -> Result<(), String> {
    check(with_placement(small(6, 2, 2)), |(s, hosts)| {
        let dt = all_pairs_shortest_paths(&s.graph).unwrap();
        let adj = adjacency(&s.graph);
        let p = Placement::new(hosts.clone());
        for f in &s.flows {
            let route = route_flow_sequence(f, &p, &dt).unwrap();
            prop_assert_eq!(route.walk.first(), Some(&f.src));
            prop_assert_eq!(route.walk.last(), Some(&f.dst));
            prop_assert_eq!(route.walk.len(), route.hops as usize + 1);
            prop_assert!(route.walk.windows(2).all(|w| s.graph.are_adjacent(w[0], w[1])));
            prop_assert_eq!(route.choice.len(), f.states.len());
            // The chosen replicas appear along the walk in state order.
            let mut pos = 0;
            for (i, &st) in f.states.iter().enumerate() {
                let h = route.choice[i];
                prop_assert!(hosts[st].contains(&h));
                match route.walk[pos..].iter().position(|&x| x == h) {
                    Some(off) => pos += off,
                    None => return Err(TestCaseError::fail(format!("replica {h} missing from walk {:?}", route.walk))),
                }
            }
            let limit = 8;
            let found = shortest_walk_by_enumeration(&adj, f, &hosts, limit);
            if route.hops as usize <= limit {
                prop_assert_eq!(found, Some(route.hops as usize));
            } else {
                prop_assert_eq!(found, None);
            }
        }
        Ok(())
    })
}

// exact solver

pub fn exact_matches_brute_force() -> Result<(), String> {
    check(small(6, 2, 2), |s| {
        let caps = default_caps(&s);
        let r = solve_exact(&s, &caps).unwrap();
        prop_assert_eq!(r.best_report.objective_total, brute_optimum(&s, &caps));
        Ok(())
    })
}

pub fn exact_monotone_in_cap() -> Result<(), String> {
    check((small(6, 2, 1), 1usize..3), |(s, cap)| {
        let n = s.node_count();
        prop_assume!(cap < n);
        let lo = s.with_max_replicas(cap);
        let hi = s.with_max_replicas(cap + 1);
        let a = solve_exact(&lo, &vec![cap; s.states.len()]).unwrap();
        let b = solve_exact(&hi, &vec![cap + 1; s.states.len()]).unwrap();
        prop_assert!(b.best_report.objective_total <= a.best_report.objective_total);
        Ok(())
    })
}

pub fn snap_baseline_consistency() -> Result<(), String> {
    check(small(8, 1, 3), |s| {
        let free = s.with_sync_rate(0.0).with_max_replicas(1);
        let exact = solve_exact(&free, &[1]).unwrap().best_report.objective_total;
        let d = all_distances(&s.graph);
        let oracle = (0..s.node_count())
            .map(|r| {
                s.flows
                    .iter()
                    .map(|f| f.demand * if f.states.is_empty() { d[f.src][f.dst] } else { d[f.src][r] + d[r][f.dst] } as f64)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(exact, oracle);
        let snap = SolverRegistry::with_builtin().get("snap").unwrap().solve(&s, &SolveRequest::default()).unwrap();
        prop_assert_eq!(snap.report.objective_total, oracle);
        prop_assert_eq!(snap.report.sync_total, 0.0);
        Ok(())
    })
}

// pmr

fn pmr_case() -> impl Strategy<Value = (Scenario, usize, PmrConfig)> {
    (small(8, 1, 3), 0usize..300, 1usize..6, any::<u64>(), any::<bool>()).prop_flat_map(|(s, iters, piters, seed, coincident)| {
        let cap = s.states[0].max_replicas;
        let cfg = PmrConfig {
            local_search_iters: iters,
            partition_iters: piters,
            rng_seed: seed,
            allow_coincident_moves: coincident,
            record_trace: true,
        };
        (Just(s), 1..=cap, Just(cfg))
    })
}

pub fn pmr_anytime() -> Result<(), String> {
    check(pmr_case(), |(s, c, cfg)| {
        let r = place_multi_replicas(&s, c, &cfg).unwrap();
        let trace = r.trace.as_ref().unwrap();
        prop_assert_eq!(trace.len(), cfg.local_search_iters);
        prop_assert!(trace.windows(2).all(|w| w[1].1 <= w[0].1));
        prop_assert!(r.report.objective_total <= r.initial_objective);
        if let Some(last) = trace.last() {
            prop_assert_eq!(last.1, r.report.objective_total);
        }
        Ok(())
    })
}

pub fn pmr_bounded_by_exact() -> Result<(), String> {
    check(pmr_case(), |(s, c, cfg)| {
        let r = place_multi_replicas(&s, c, &cfg).unwrap();
        let exact = solve_exact(&s.with_max_replicas(c), &[c]).unwrap();
        prop_assert!(r.report.objective_total >= exact.best_report.objective_total);
        prop_assert!(r.distinct_count <= c);
        prop_assert_eq!(r.distinct_count, r.placement.distinct_count(0));
        let dt = all_pairs_shortest_paths(&s.graph).unwrap();
        prop_assert_eq!(r.report.sync_total, sync_cost(s.states[0].sync_rate, &r.placement.distinct_hosts(0), &dt));
        if !cfg.allow_coincident_moves && cfg.local_search_iters > 0 {
            prop_assert_eq!(r.distinct_count, c);
        }
        Ok(())
    })
}

pub fn pmr_deterministic() -> Result<(), String> {
    check(pmr_case(), |(s, c, cfg)| {
        let a = place_multi_replicas(&s, c, &cfg).unwrap();
        let b = place_multi_replicas(&s, c, &cfg).unwrap();
        prop_assert_eq!(a.placement, b.placement);
        prop_assert_eq!(a.trace, b.trace);
        prop_assert_eq!(a.report.objective_total, b.report.objective_total);
        Ok(())
    })
}

// asymptotic model

/// Shared moderate-precision distance curve for c = 1..=40.
fn curve() -> &'static [DistanceEstimate] {
    static CURVE: OnceLock<Vec<DistanceEstimate>> = OnceLock::new();
    CURVE.get_or_init(|| DistanceCache::default().curve(40, 20_000, 11).unwrap())
}

fn argmin_with_beta(n: usize, ratio: f64, beta: f64, curve: &[DistanceEstimate]) -> usize {
    let mut best = (0, f64::INFINITY);
    for e in curve {
        let t = total_traffic(n, e.c, 1.0, ratio, beta, e.d_data, e.d_sync);
        if t < best.1 {
            best = (e.c, t);
        }
    }
    best.0
}

pub fn beta_does_not_move_argmin() -> Result<(), String> {
    let curve = curve();
    check((2usize..400, 0.01f64..10.0, 0.5f64..1.414), |(n, ratio, beta)| {
        let part = &curve[..default_c_max(n)];
        let reference = optimal_replicas_from(n, 1.0, ratio, part).unwrap();
        prop_assert_eq!(argmin_with_beta(n, ratio, 1.0, part), reference);
        prop_assert_eq!(argmin_with_beta(n, ratio, beta, part), reference);
        Ok(())
    })
}

pub fn grid_hops_within_embedding_bounds() -> Result<(), String> {
    let s = (2usize..=16).prop_flat_map(|k| (Just(k), proptest::collection::vec((0..k * k, 0..k * k), 1..20)));
    check(s, |(k, pairs)| {
        let g = gen_manhattan(k, k, f64::INFINITY).unwrap();
        let dt = all_pairs_shortest_paths(&g).unwrap();
        let root_n = k as f64;
        let pos = |v: usize| (((v % k) as f64 + 0.5) / root_n, ((v / k) as f64 + 0.5) / root_n);
        for (a, b) in pairs {
            let (pa, pb) = (pos(a), pos(b));
            let d = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
            let h = dt.dist(a, b) as f64;
            prop_assert!(d * root_n <= h + 1e-9);
            prop_assert!(h <= d * 2f64.sqrt() * root_n + 1e-9);
        }
        Ok(())
    })
}

pub fn search_monotone_in_n_and_ratio() -> Result<(), String> {
    let curve = curve();
    check((2usize..400, 2usize..400, 0.01f64..10.0, 0.01f64..10.0), |(n1, n2, r1, r2)| {
        let (n_lo, n_hi) = (n1.min(n2), n1.max(n2));
        let (r_lo, r_hi) = (r1.min(r2), r1.max(r2));
        let part = &curve[..default_c_max(400)];
        let c = |n, r| optimal_replicas_from(n, 1.0, r, part).unwrap();
        prop_assert!(c(n_lo, r_lo) <= c(n_hi, r_lo));
        prop_assert!(c(n_lo, r_hi) <= c(n_lo, r_lo));
        Ok(())
    })
}

// experiments

pub fn experiment_rows_consistent() -> Result<(), String> {
    let s = (2usize..=3, 2usize..=3, proptest::collection::vec(proptest::sample::select(DYADIC_RATES.to_vec()), 1..3), 1usize..=3, any::<u64>());
    check(s, |(rows, cols, rates, seeds, base_seed)| {
        let json = serde_json::json!({
            "name": "prop",
            "topology": {"kind": "manhattan", "rows": rows, "cols": cols},
            "sync_rates": rates,
            "caps": [1, 2],
            "seeds": seeds,
            "base_seed": base_seed,
            "solvers": ["exact", "pmr", "snap"],
            "pmr": {"local_search_iters": 20},
        });
        let cfg = ExperimentConfig::from_json(&json.to_string()).unwrap();
        let out = run_experiment(&cfg, &SolverRegistry::with_builtin()).unwrap();
        prop_assert_eq!(out.len(), rates.len() * 6 * seeds);
        let get = |rate: f64, label: &str, seed: u64| {
            out.iter().find(|r| r.sync_rate == rate && r.solver == label && r.seed == seed).unwrap().objective.unwrap()
        };
        for r in &out {
            prop_assert_eq!(r.status.as_str(), "ok");
            prop_assert_eq!(r.objective.unwrap(), r.data_total.unwrap() + r.sync_total.unwrap());
            prop_assert!(get(r.sync_rate, "lower-bound", r.seed) <= r.objective.unwrap());
            if let Some(c) = r.solver.strip_prefix("pmr-c") {
                let reference = get(r.sync_rate, &format!("exact-c{}", c), r.seed);
                prop_assert!(r.objective.unwrap() >= reference);
            }
        }
        Ok(())
    })
}

pub fn ci_shrinks_with_root_seeds() -> Result<(), String> {
    check(proptest::collection::vec(0.0f64..100.0, 2..60), |xs| {
        let base = mean_ci(&xs);
        prop_assume!(base.ci95 > 1e-6);
        let doubled: Vec<f64> = xs.iter().chain(xs.iter()).copied().collect();
        let d = mean_ci(&doubled);
        let n = xs.len() as f64;
        // Duplicating the sample shrinks the half-width by sqrt((n-1)/(2n-1)) ≈ 1/√2.
        let want = ((n - 1.0) / (2.0 * n - 1.0)).sqrt();
        prop_assert!((d.ci95 / base.ci95 - want).abs() < 1e-9);
        prop_assert!((d.mean - base.mean).abs() < 1e-9);
        Ok(())
    })
}
