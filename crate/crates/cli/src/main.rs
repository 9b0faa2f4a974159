use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use tdroute::ch::{load_cached, save_cache, ChIndex, ScalarGraph};
use tdroute::engine::{error_bound, TdsIndex, TdsOptions};
use tdroute::eval::{
    gen_rank, gen_uniform, run_benchmark, run_exhaustive, write_records, write_summaries, Algo, BenchConfig,
    Class, ErrorRecord, ExhaustiveConfig,
};
use tdroute::network::{self, GeneratorConfig, TdPlacement};
use tdroute::ttf::{default_windows, TimeWindow};
use tdroute::{AltConfig, Decis, EaQuery, Graph, Time};

#[derive(Parser)]
#[command(name = "tdroute", version, about = "Time-dependent routing with per-window contraction hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance
    Generate(GenerateArgs),
    /// Print instance statistics
    Stats {
        graph: PathBuf,
    },
    /// Build all hierarchies and store them in a cache directory
    Preprocess {
        graph: PathBuf,
        #[command(flatten)]
        index: IndexArgs,
    },
    /// Answer one earliest-arrival query
    Query(QueryArgs),
    /// Sample a profile with the restricted search
    Profile(ProfileArgs),
    /// Compare algorithms against the exact search on random queries
    Bench(BenchArgs),
    /// All pairs of a strided node set at strided departure times
    Exhaustive(ExhaustiveArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output instance file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    nodes: usize,
    #[arg(long, default_value_t = 5.0)]
    degree: f64,
    #[arg(long, default_value_t = 0.05)]
    td_fraction: f64,
    #[arg(long, default_value_t = 16)]
    breakpoints: usize,
    #[arg(long, default_value_t = 2)]
    peaks: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Spread time-dependent edges uniformly instead of favouring fast roads
    #[arg(long)]
    uniform_placement: bool,
    /// Round speeds to multiples of this many km/h
    #[arg(long)]
    speed_step: Option<f64>,
}

#[derive(Args, Clone)]
struct IndexArgs {
    /// Comma separated time windows, e.g. 0:00-6:00,7:00-9:00
    #[arg(long, value_delimiter = ',')]
    windows: Option<Vec<String>>,
    /// Directory for cached hierarchies
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct MarkArgs {
    /// Stretch bound for alternatives
    #[arg(long, default_value_t = 1.2)]
    stretch: f64,
    /// Also mark the freeflow shortest path
    #[arg(long)]
    include_freeflow: bool,
}

#[derive(Args)]
struct QueryArgs {
    graph: PathBuf,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    t: u32,
    /// Departure in seconds after midnight
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value = "tds")]
    algo: String,
    /// Compare with the exact search
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    index: IndexArgs,
    #[command(flatten)]
    mark: MarkArgs,
}

#[derive(Args)]
struct ProfileArgs {
    graph: PathBuf,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    t: u32,
    /// Sample rate in seconds; must divide one day
    #[arg(long, default_value_t = 600.0)]
    rate: f64,
    #[command(flatten)]
    index: IndexArgs,
}

#[derive(Args)]
struct BenchArgs {
    graph: PathBuf,
    /// Comma separated list of freeflow, tds, tds-a
    #[arg(long, value_delimiter = ',', default_value = "freeflow,tds,tds-a")]
    algo: Vec<String>,
    /// Number of uniform queries
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    /// Use Dijkstra-rank queries with this many sources instead of uniform ones
    #[arg(long)]
    rank_sources: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Per-query records
    #[arg(long)]
    out: PathBuf,
    /// Summary table
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Fill the time_us column (output is then no longer reproducible)
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    index: IndexArgs,
    #[command(flatten)]
    mark: MarkArgs,
}

#[derive(Args)]
struct ExhaustiveArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    node_stride: usize,
    /// Departure stride in seconds
    #[arg(long, default_value_t = 300.0)]
    time_stride: f64,
    #[arg(long, default_value = "tds")]
    algo: String,
    /// Maximum number of queries
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Outlier records, grouped by source and target
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    index: IndexArgs,
    #[command(flatten)]
    mark: MarkArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Stats { graph } => stats(&graph),
        Command::Preprocess { graph, index } => {
            let graph = load(&graph)?;
            let idx = build_index(graph, &index)?;
            let shortcuts: usize = (0..idx.windows().len())
                .map(|i| idx.window_hierarchy(i).shortcut_count())
                .sum();
            println!("windows: {}", format_windows(idx.windows()));
            println!("hierarchies: {}", idx.windows().len() + 1);
            println!("window shortcuts: {shortcuts}");
            println!("freeflow shortcuts: {}", idx.freeflow_hierarchy().shortcut_count());
            Ok(())
        }
        Command::Query(a) => query(a),
        Command::Profile(a) => profile(a),
        Command::Bench(a) => bench(a),
        Command::Exhaustive(a) => exhaustive(a),
    }
}

fn load(path: &Path) -> anyhow::Result<Graph> {
    network::load(path).with_context(|| format!("loading {}", path.display()))
}

fn windows(args: &IndexArgs) -> anyhow::Result<Vec<TimeWindow<Decis>>> {
    match &args.windows {
        None => Ok(default_windows()),
        Some(list) => list.iter().map(|w| Ok(w.trim().parse()?)).collect(),
    }
}

fn format_windows(windows: &[TimeWindow<Decis>]) -> String {
    windows.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn build_index(graph: Graph, args: &IndexArgs) -> anyhow::Result<TdsIndex<Decis>> {
    let windows = windows(args)?;
    let graph = Arc::new(graph);
    let Some(dir) = &args.cache_dir else {
        return Ok(TdsIndex::build(graph, windows)?);
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let cached = |slot: Option<usize>, scalar: &ScalarGraph<Decis>| {
        let path = match slot {
            Some(i) => dir.join(format!("window{i}.ch")),
            None => dir.join("freeflow.ch"),
        };
        if let Ok(Some(ch)) = load_cached(scalar, &path) {
            return ch;
        }
        let ch = ChIndex::build(scalar);
        if let Err(e) = save_cache(&ch, scalar, &path) {
            eprintln!("warning: could not write {}: {e}", path.display());
        }
        ch
    };
    Ok(TdsIndex::build_with(graph, windows, cached)?)
}

fn seconds(t: Decis) -> String {
    let s = t.to_seconds();
    let whole = s.floor() as i64;
    format!(
        "{s} s ({}{}:{:02}:{:02}{})",
        if whole >= 86_400 { format!("day {} ", whole / 86_400) } else { String::new() },
        (whole % 86_400) / 3600,
        (whole % 3600) / 60,
        whole % 60,
        if t % 10 != 0 { format!(".{}", t % 10) } else { String::new() },
    )
}

fn departure(tau: f64) -> anyhow::Result<Decis> {
    if !(0.0..86_400.0).contains(&tau) {
        bail!("departure {tau} s is outside of the day");
    }
    Ok(Decis::from_seconds(tau))
}

fn generate(a: GenerateArgs) -> anyhow::Result<()> {
    let cfg = GeneratorConfig {
        node_count: a.nodes,
        avg_degree: a.degree,
        td_fraction: a.td_fraction,
        breakpoints_per_td_edge: a.breakpoints,
        rush_hour_peaks: a.peaks,
        seed: a.seed,
        placement: if a.uniform_placement {
            TdPlacement::Uniform
        } else {
            TdPlacement::Important
        },
        speed_step_kmh: a.speed_step,
    };
    let graph = network::generate(&cfg)?;
    network::store(&graph, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    print_stats(&graph);
    Ok(())
}

fn stats(path: &Path) -> anyhow::Result<()> {
    print_stats(&load(path)?);
    Ok(())
}

fn print_stats(graph: &Graph) {
    let s = graph.stats();
    println!("nodes: {}", s.node_count);
    println!("edges: {}", s.edge_count);
    println!("td edges: {} ({:.2} %)", s.td_edge_count, 100.0 * s.td_edge_fraction);
    println!("breakpoints per td edge: {:.2}", s.avg_breakpoints_per_td_edge);
    println!("largest strongly connected component: {}", graph.largest_scc().len());
}

fn tds_options(mark: &MarkArgs) -> anyhow::Result<(TdsOptions, AltConfig)> {
    if !(mark.stretch >= 1.0) {
        bail!("stretch must be at least 1");
    }
    let options = TdsOptions {
        include_freeflow: mark.include_freeflow,
        ..TdsOptions::default()
    };
    Ok((options, AltConfig { stretch: mark.stretch }))
}

fn query(a: QueryArgs) -> anyhow::Result<()> {
    let algo: Algo = a.algo.parse()?;
    let (options, alt) = tds_options(&a.mark)?;
    let tau = departure(a.tau)?;
    let graph = load(&a.graph)?;
    let idx = build_index(graph, &a.index)?;
    let q = EaQuery { s: a.s, t: a.t, tau };
    let mut ctx = idx.context();
    let result = match algo {
        Algo::Freeflow => idx.query_freeflow(&mut ctx, q)?,
        Algo::Tds => idx.query_with(&mut ctx, q, &options)?,
        Algo::TdsA => idx.query_with(
            &mut ctx,
            q,
            &TdsOptions {
                alternatives: Some(alt),
                ..options
            },
        )?,
    };
    let Some(result) = result else {
        println!("{} -> {}: unreachable", a.s, a.t);
        return Ok(());
    };
    println!("algorithm: {algo}");
    println!("departure: {}", seconds(tau));
    println!("arrival: {}", seconds(result.arrival));
    println!("travel time: {} s", (result.arrival - tau).to_seconds());
    println!("path edges: {}", result.path.len());
    if algo != Algo::Freeflow {
        println!("marked edges: {}", ctx.marks().count());
    }
    if a.check {
        let exact = tdroute::td_dijkstra(idx.graph(), q).context("exact search found no path")?;
        let rec = ErrorRecord::new(0, q, algo, exact.arrival, result.arrival)?;
        println!("exact arrival: {}", seconds(exact.arrival));
        println!("absolute error: {} s", rec.abs_error);
        println!("relative error: {}", rec.rel_error);
    }
    Ok(())
}

fn profile(a: ProfileArgs) -> anyhow::Result<()> {
    let rate_ticks = a.rate * 10.0;
    if rate_ticks.fract() != 0.0 || rate_ticks <= 0.0 {
        bail!("sample rate must be a positive multiple of 0.1 s");
    }
    let rate = rate_ticks as Decis;
    let graph = load(&a.graph)?;
    let idx = build_index(graph, &a.index)?;
    let mut ctx = idx.context();
    let Some(p) = idx.query_profile(&mut ctx, a.s, a.t, rate)? else {
        println!("{} -> {}: unreachable", a.s, a.t);
        return Ok(());
    };
    println!("samples: {}", p.len());
    println!("departure,arrival_s,travel_s");
    for (i, &arrival) in p.arrivals().iter().enumerate() {
        let dep = p.departure(i);
        let d = dep / 10;
        println!(
            "{}:{:02}:{:02},{},{}",
            d / 3600,
            (d % 3600) / 60,
            d % 60,
            arrival.to_seconds(),
            (arrival - dep).to_seconds()
        );
    }
    let bounds = p.slope_bounds();
    println!("distinct paths: {}", p.count_distinct_paths());
    println!("marked edges: {}", ctx.marks().count());
    println!("slope bounds: max {} min {}", bounds.lambda_max, bounds.lambda_min);
    println!(
        "interpolation error bound: {} s (holds for exactly computed samples)",
        error_bound(rate, bounds).seconds
    );
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let algos = a.algo.iter().map(|s| s.parse()).collect::<Result<Vec<Algo>, _>>()?;
    let (options, alt) = tds_options(&a.mark)?;
    if a.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let graph = load(&a.graph)?;
    let idx = build_index(graph, &a.index)?;
    let (queries, ranks) = match a.rank_sources {
        None => (gen_uniform(idx.graph(), a.queries, a.seed), None),
        Some(sources) => {
            let rq = gen_rank(idx.graph(), sources, a.seed);
            (rq.iter().map(|q| q.query).collect(), Some(rq.iter().map(|q| q.rank).collect::<Vec<_>>()))
        }
    };
    let cfg = BenchConfig {
        algos,
        options,
        alt,
        workers: a.workers,
        timings: a.timings,
    };
    let report = run_benchmark(&idx, &queries, ranks.as_deref(), &cfg)?;
    write_records(create(&a.out)?, &report.records)?;
    if let Some(path) = &a.summary {
        write_summaries(create(path)?, &report.summaries)?;
    }
    println!("queries: {}", queries.len());
    if report.exact_unreachable > 0 {
        println!("unreachable (excluded): {}", report.exact_unreachable);
    }
    println!("algo     rank  optimal%  mean_rel    q99.9_rel   max_rel     median_us  speedup");
    for s in &report.summaries {
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
        println!(
            "{:<8} {:>4}  {:>8.2}  {:<10.3e}  {:<10.3e}  {:<10.3e}  {:>9}  {:>7}",
            s.algo.name(),
            s.rank.map_or_else(|| "all".into(), |r| r.to_string()),
            100.0 * s.optimal_fraction,
            s.mean_rel_error,
            s.q999_rel_error,
            s.max_rel_error,
            opt(s.median_time_us),
            opt(s.speedup),
        );
    }
    Ok(())
}

fn exhaustive(a: ExhaustiveArgs) -> anyhow::Result<()> {
    let algo: Algo = a.algo.parse()?;
    let (options, alt) = tds_options(&a.mark)?;
    let stride = a.time_stride * 10.0;
    if stride.fract() != 0.0 || stride <= 0.0 {
        bail!("time stride must be a positive multiple of 0.1 s");
    }
    let graph = load(&a.graph)?;
    let idx = build_index(graph, &a.index)?;
    let cfg = ExhaustiveConfig {
        budget: a.budget,
        algo,
        options,
        alt,
        workers: a.workers.max(1),
        ..ExhaustiveConfig::new(a.node_stride, stride as Decis)
    };
    let report = run_exhaustive(&idx, &cfg)?;
    write_records(create(&a.out)?, &report.outlier_records)?;
    println!("sources: {}", report.sources);
    println!("departures: {}", report.departures);
    println!("queries: {}", report.total);
    if report.unreachable > 0 {
        println!("unreachable: {}", report.unreachable);
    }
    println!("optimal: {:.4} %", 100.0 * report.fraction(Class::Optimal));
    println!("quasi-optimal: {:.4} %", 100.0 * report.fraction(Class::QuasiOptimal));
    println!("outliers: {:.4} %", 100.0 * report.fraction(Class::Outlier));
    Ok(())
}
