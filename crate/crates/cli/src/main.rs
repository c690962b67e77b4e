use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stateplace::asymptotic::{default_c_max, AsymptoticFit, DistanceCache, DistanceEstimate, DEFAULT_SAMPLES};
use stateplace::evaluator::{solution_json, Evaluator};
use stateplace::exact::{ExactOptions, DEFAULT_BUDGET};
use stateplace::experiment::asymptotic::{dcurve_chart, error_chart, fit_table, optimal_count_chart, optimal_count_table, perfect_squares, OptimalCountRow};
use stateplace::experiment::{rows_to_csv, run_experiment, summarize, summary_to_csv, write_outputs, ExperimentConfig, ResultRow, TopologyConfig, TrafficKind};
use stateplace::pmr::PmrConfig;
use stateplace::scenario::{load_scenario, scenario_to_json};
use stateplace::solver::{SolveRequest, SolverRegistry};
use stateplace::{rng, Error, FlowSpec, Scenario, StateSpec};

#[derive(Parser)]
#[command(name = "stateplace", version, about = "Replica placement for stateful data planes")]
struct Cli {
    /// Base random seed
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (generate, solve) or directory (experiment, asymptotic)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file
    Generate(GenerateArgs),
    /// Place replicas for a scenario file
    Solve(SolveArgs),
    /// Run a declarative sweep from a JSON config
    Experiment(ExperimentArgs),
    /// Unit-square model: distance curves, optimal counts, fit, formula error
    Asymptotic(AsymptoticArgs),
    /// Least-squares fit of optimal counts read from CSV (n,ratio,c_opt)
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Topology {
    Manhattan,
    Ws,
}

#[derive(Clone, Copy, ValueEnum)]
enum Traffic {
    Uniform,
    Clustered,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    topology: Topology,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    traffic: Traffic,
    #[arg(long, default_value_t = 1.0)]
    demand: f64,
    /// Number of states every flow visits in order
    #[arg(long, default_value_t = 1)]
    states: usize,
    #[arg(long, default_value_t = 1.0)]
    sync_rate: f64,
    /// Replica bound per state (default: node count)
    #[arg(long)]
    max_replicas: Option<usize>,
    /// Link capacity (default: unbounded)
    #[arg(long)]
    capacity: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    scenario: PathBuf,
    #[arg(long, default_value = "exact")]
    solver: String,
    /// Replica cap applied to every state
    #[arg(long, visible_alias = "cs")]
    cap: Option<usize>,
    /// Override the scenario's sync rate for every state
    #[arg(long)]
    sync_rate: Option<f64>,
    /// PMR local-search iterations
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 10)]
    partition_iters: usize,
    /// Forbid PMR moves onto nodes that already host a replica
    #[arg(long)]
    no_coincident: bool,
    /// Write the PMR improvement trace (iteration,objective) as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// List registered solvers and exit
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    config: PathBuf,
    /// Override the configured seed count
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    no_charts: bool,
}

#[derive(Args)]
struct AsymptoticArgs {
    /// Emit d_data/d_sync for c = 1..=cmax
    #[arg(long)]
    dcurves: bool,
    #[arg(long, default_value_t = 400)]
    cmax: usize,
    /// Fit the optimal-count power law
    #[arg(long)]
    fit: bool,
    /// Compare the closed-form count with the exhaustive search
    #[arg(long)]
    error_vs_formula: bool,
    /// Node counts (default: squares 9..4096 for --fit, 9..36 otherwise)
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    /// Sync-to-flow rate ratios
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 1.0])]
    ratios: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// JSON file memoizing Monte Carlo estimates across runs
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_infeasible() => 3,
        Some(Error::Io(_)) | None => 1,
        Some(_) => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("thread pool")?;
    }
    let out = cli.out.as_deref();
    match cli.cmd {
        Command::Generate(a) => generate(&a, cli.seed, out),
        Command::Solve(a) => solve(&a, cli.seed, out, cli.format.unwrap_or(Format::Json)),
        Command::Experiment(a) => experiment(&a, out),
        Command::Asymptotic(a) => asymptotic(&a, cli.seed, out, cli.format.unwrap_or(Format::Csv)),
        Command::Fit(a) => fit(&a, cli.format.unwrap_or(Format::Json)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(a: &GenerateArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    if a.states == 0 {
        return Err(Error::InvalidArgument("--states must be at least 1".into()).into());
    }
    let capacity = a.capacity.unwrap_or(f64::INFINITY);
    let topology = match a.topology {
        Topology::Manhattan => TopologyConfig::Manhattan { rows: a.rows, cols: a.cols, capacity },
        Topology::Ws => TopologyConfig::WattsStrogatz { n: a.n, k: a.k, p: a.p, capacity },
    };
    let traffic = match a.traffic {
        Traffic::Uniform => TrafficKind::Uniform,
        Traffic::Clustered => TrafficKind::Clustered,
    };
    let g = topology.build(seed)?;
    let flows: Vec<FlowSpec> = traffic
        .build(&g, a.demand, rng::mix(seed, 1))?
        .into_iter()
        .map(|f| FlowSpec { states: (0..a.states).collect(), ..f })
        .collect();
    let n = g.node_count();
    let max_replicas = a.max_replicas.unwrap_or(n);
    let states = (0..a.states)
        .map(|i| StateSpec {
            id: if a.states == 1 { "s".into() } else { format!("s{i}") },
            max_replicas,
            sync_rate: a.sync_rate,
        })
        .collect();
    let s = Scenario::new(g, states, flows)?
        .with_meta("topology", topology.label())
        .with_meta("traffic", traffic.label())
        .with_meta("seed", seed);
    emit(out, &scenario_to_json(&s))
}

fn solve(a: &SolveArgs, seed: u64, out: Option<&Path>, format: Format) -> Result<()> {
    let registry = SolverRegistry::with_builtin();
    if a.list {
        for (name, desc) in registry.list() {
            println!("{name}\t{desc}");
        }
        return Ok(());
    }
    let solver = registry.get(&a.solver)?;
    let mut scenario = load_scenario(&a.scenario)?;
    if let Some(r) = a.sync_rate {
        scenario = scenario.with_sync_rate(r);
    }
    let caps = a.cap.map(|c| vec![c; scenario.states.len()]);
    if let Some(c) = a.cap {
        scenario = scenario.with_max_replicas(c);
    }
    let req = SolveRequest {
        caps,
        pmr: PmrConfig {
            local_search_iters: a.iters,
            partition_iters: a.partition_iters,
            rng_seed: seed,
            allow_coincident_moves: !a.no_coincident,
            record_trace: a.trace.is_some(),
        },
        exact: ExactOptions { budget: a.budget },
    };
    let start = Instant::now();
    let outcome = solver.solve(&scenario, &req)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    if let (Some(path), Some(trace)) = (&a.trace, outcome.details.get("trace").and_then(|t| t.as_array())) {
        let mut text = String::from("iteration,objective\n");
        for p in trace {
            text.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }

    let text = match format {
        Format::Json => {
            let ev = Evaluator::new(&scenario)?;
            let (sol, report) = ev.evaluate(&outcome.placement)?;
            let mut doc = solution_json(&scenario, &outcome.placement, &sol, &report);
            doc["solver"] = json!(outcome.solver);
            doc["distinct_replicas"] = json!(outcome.distinct_counts);
            doc["lower_bound"] = json!(ev.lower_bound());
            doc["runtime_ms"] = json!(runtime_ms);
            doc["details"] = outcome.details.clone();
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let meta = |k: &str| scenario.meta.get(k).and_then(|v| v.as_str()).unwrap_or("").to_string();
            let row = ResultRow {
                experiment: "solve".into(),
                topology: meta("topology"),
                n: scenario.node_count(),
                traffic: meta("traffic"),
                sync_rate: scenario.states[0].sync_rate,
                solver: match a.cap {
                    Some(c) if outcome.solver != "snap" => format!("{}-c{c}", outcome.solver),
                    _ => outcome.solver.to_string(),
                },
                seed,
                objective: Some(outcome.report.objective_total),
                data_total: Some(outcome.report.data_total),
                sync_total: Some(outcome.report.sync_total),
                distinct_replicas: Some(outcome.total_distinct()),
                max_link_load: Some(outcome.report.max_link_load),
                runtime_ms,
                status: "ok".into(),
            };
            rows_to_csv(&[row])?
        }
    };
    emit(out, &text)
}

fn experiment(a: &ExperimentArgs, out: Option<&Path>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(s) = a.seeds {
        cfg.seeds = s;
    }
    if a.no_charts {
        cfg.output.charts = false;
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let rows = run_experiment(&cfg, &SolverRegistry::with_builtin())?;
    let files = write_outputs(&cfg, &rows, &dir)?;
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    let flows = cfg.instance(0)?.flows.len();
    print!("{}", summary_to_csv(&summarize(&rows, flows))?);
    Ok(())
}

fn dcurves_csv(curve: &[DistanceEstimate]) -> String {
    let mut s = String::from("c,d_data,d_sync,std_err,samples\n");
    for e in curve {
        s.push_str(&format!("{},{},{},{},{}\n", e.c, e.d_data, e.d_sync, e.std_err, e.samples));
    }
    s
}

fn counts_csv(rows: &[OptimalCountRow]) -> String {
    let mut s = String::from("n,ratio,c_search,c_formula,abs_error\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.n, r.ratio, r.c_search, r.c_formula, r.abs_error));
    }
    s
}

/// Per node count: the largest and mean formula error over the ratios.
fn error_csv(rows: &[OptimalCountRow]) -> String {
    let mut s = String::from("n,max_abs_error,mean_abs_error\n");
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    for n in ns {
        let errs: Vec<usize> = rows.iter().filter(|r| r.n == n).map(|r| r.abs_error).collect();
        let max = errs.iter().max().copied().unwrap_or(0);
        let mean = errs.iter().sum::<usize>() as f64 / errs.len() as f64;
        s.push_str(&format!("{n},{max},{mean}\n"));
    }
    s
}

fn asymptotic(a: &AsymptoticArgs, seed: u64, out: Option<&Path>, format: Format) -> Result<()> {
    let dcurves = a.dcurves || !(a.fit || a.error_vs_formula);
    let fit_nodes = a.nodes.clone().unwrap_or_else(|| perfect_squares(9, 4096));
    let err_nodes = a.nodes.clone().unwrap_or_else(|| perfect_squares(9, 36));
    if a.samples == 0 || a.cmax == 0 || a.ratios.iter().any(|r| !(*r > 0.0)) || fit_nodes.contains(&0) {
        return Err(Error::InvalidArgument("samples, cmax, node counts and ratios must be positive".into()).into());
    }
    let mut c_max = if dcurves { a.cmax } else { 1 };
    if a.fit {
        c_max = c_max.max(fit_nodes.iter().map(|&n| default_c_max(n)).max().unwrap_or(1));
    }
    if a.error_vs_formula {
        c_max = c_max.max(err_nodes.iter().map(|&n| default_c_max(n)).max().unwrap_or(1));
    }
    let mut cache = match &a.cache {
        Some(p) => DistanceCache::load(p)?,
        None => DistanceCache::default(),
    };
    let curve = cache.curve(c_max, a.samples, seed)?;
    if let (Some(p), true) = (&a.cache, cache.is_dirty()) {
        cache.save(p)?;
    }

    let mut outputs: Vec<(String, String)> = Vec::new();
    if dcurves {
        let part = &curve[..a.cmax];
        outputs.push(("dcurves.csv".into(), dcurves_csv(part)));
        outputs.push(("dcurves.svg".into(), dcurve_chart(part).render()));
    }
    if a.fit {
        let rows = optimal_count_table(&fit_nodes, &a.ratios, &curve)?;
        let fit = fit_table(&rows)?;
        let text = fit_text(&fit, rows.len(), format)?;
        outputs.push(("optimal_counts.csv".into(), counts_csv(&rows)));
        outputs.push((format!("fit.{}", if format == Format::Json { "json" } else { "csv" }), text));
        outputs.push(("optimal_counts.svg".into(), optimal_count_chart(&rows, Some(&fit)).render()));
    }
    if a.error_vs_formula {
        let rows = optimal_count_table(&err_nodes, &a.ratios, &curve)?;
        outputs.push(("formula_error.csv".into(), error_csv(&rows)));
        outputs.push(("formula_error_detail.csv".into(), counts_csv(&rows)));
        outputs.push(("formula_error.svg".into(), error_chart(&rows).render()));
    }

    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (name, text) in &outputs {
                let p = dir.join(name);
                std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            let tables: Vec<&(String, String)> =
                outputs.iter().filter(|(n, _)| !n.ends_with(".svg") && !n.ends_with("_detail.csv")).collect();
            for (i, (_, text)) in tables.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn fit_text(fit: &AsymptoticFit, points: usize, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let doc = json!({
                "x": fit.x,
                "y": fit.y,
                "z": fit.z,
                "coefficient": fit.coefficient(),
                "residual_norm": fit.residual_norm,
                "points": points,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => format!(
            "x,y,z,coefficient,residual_norm\n{},{},{},{},{}\n",
            fit.x,
            fit.y,
            fit.z,
            fit.coefficient(),
            fit.residual_norm
        ),
    })
}

fn fit(a: &FitArgs, format: Format) -> Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().context("empty input")?.split(',').map(str::trim).collect();
    let col = |names: &[&str]| header.iter().position(|h| names.contains(h));
    let (Some(ni), Some(ri), Some(ci)) = (col(&["n"]), col(&["ratio"]), col(&["c_opt", "c_search"])) else {
        bail!(Error::Parse(format!("{}: need columns n, ratio and c_opt", a.input.display())));
    };
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("{}: line {}: `{line}`", a.input.display(), lineno + 2));
        let get = |i: usize| f.get(i).copied().ok_or_else(bad);
        let n: usize = get(ni)?.parse().map_err(|_| bad())?;
        let ratio: f64 = get(ri)?.parse().map_err(|_| bad())?;
        let c: usize = get(ci)?.parse().map_err(|_| bad())?;
        rows.push(OptimalCountRow { n, ratio, c_search: c, c_formula: 0, abs_error: 0 });
    }
    let fit = fit_table(&rows)?;
    let text = fit_text(&fit, rows.len(), format)?;
    print!("{text}");
    Ok(())
}
