//! `hiermap` command-line tool: map task graphs onto hierarchical machines,
//! audit mappings, benchmark configurations and compare them with
//! performance profiles.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hiermap::eval::bench::{self, Baseline, BenchPlan, RunConfig, RunRecord};
use hiermap::eval::{oracle, profile};
use hiermap::multisection::Multisection;
use hiermap::{
    check_balance, comm_cost, parse_hierarchy, parse_ratio, read_metis, Graph, Hierarchy, Mapping, PartitionConfig,
    Preset, Strategy,
};

#[derive(Parser)]
#[command(name = "hiermap", version, about = "Hierarchical process mapping by parallel multisection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map a METIS graph onto a hierarchy.
    Map(MapArgs),
    /// Report cost and balance of an existing mapping.
    Eval(EvalArgs),
    /// Run every configuration on every instance with several seeds.
    Bench(BenchArgs),
    /// Performance profiles from an algorithm,instance,quality table.
    Perfprofile(ProfileArgs),
    /// Optimal mapping of a tiny instance by exhaustive search.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Machine {
    /// METIS graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Arities per level, processor level first, e.g. 4:8:2.
    #[arg(long)]
    hierarchy: String,
    /// Distance per level, e.g. 1:10:100.
    #[arg(long)]
    distance: String,
    /// Allowed imbalance epsilon.
    #[arg(long, default_value = "0.03")]
    imbalance: String,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    machine: Machine,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value = "nb-layer")]
    strategy: Strategy,
    #[arg(long, default_value = "eco")]
    preset: Preset,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Mapping file, one PE id per line (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run record as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    machine: Machine,
    /// Mapping file, one PE id per line.
    #[arg(long)]
    mapping: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// File listing one METIS graph path per line.
    #[arg(long)]
    instances: PathBuf,
    /// Hierarchy, repeatable; paired with --distance in order.
    #[arg(long, required = true)]
    hierarchy: Vec<String>,
    #[arg(long, required = true)]
    distance: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "nb-layer")]
    strategies: Vec<Strategy>,
    #[arg(long, value_delimiter = ',', default_value = "eco")]
    presets: Vec<Preset>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    #[arg(long, default_value = "0.03")]
    imbalance: String,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Per-run CSV (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-configuration CSV averaged over seeds.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Configuration speedups are measured against, e.g. strong-1.
    #[arg(long)]
    baseline: Option<Baseline>,
}

#[derive(Args)]
struct ProfileArgs {
    /// CSV with header algorithm,instance,quality.
    #[arg(long)]
    table: PathBuf,
    /// Explicit tau values; by default 101 points from 1 to the largest ratio.
    #[arg(long, value_delimiter = ',')]
    taus: Vec<f64>,
    /// Profile CSV (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// SVG plot of the profile.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    machine: Machine,
    /// Optimal mapping, one PE id per line.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Map(args) => cmd_map(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Perfprofile(args) => cmd_perfprofile(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_metis(BufReader::new(file)).with_context(|| format!("cannot read {}", path.display()))
}

fn load_machine(m: &Machine) -> Result<(Graph, Hierarchy)> {
    let hierarchy = parse_hierarchy(&m.hierarchy, &m.distance)?;
    let graph = load_graph(&m.graph)?;
    Ok((graph, hierarchy))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Writes to `path`, or to stdout when no path is given.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn instance_name(path: &Path) -> String {
    bench::Instance::from_path(path).name
}

fn cmd_map(args: MapArgs) -> Result<()> {
    let eps = parse_ratio(&args.machine.imbalance)?;
    let (graph, hierarchy) = load_machine(&args.machine)?;
    if graph.n() < hierarchy.k() {
        bail!("graph has {} vertices but the hierarchy has {} PEs (n < k)", graph.n(), hierarchy.k());
    }
    let cfg = PartitionConfig::preset(args.preset);
    let run = Multisection::new(hierarchy.clone(), eps, args.threads, args.strategy, cfg, args.seed);
    let (mapping, stats) = run.run(&graph)?;
    with_output(args.output.as_deref(), |w| Ok(mapping.write(w)?))?;

    let config = RunConfig { strategy: args.strategy, preset: args.preset, threads: args.threads };
    let record = RunRecord::new(
        &instance_name(&args.machine.graph),
        &hierarchy,
        &args.machine.imbalance,
        &config,
        args.seed,
        &stats,
    );
    if let Some(path) = &args.stats {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &record)?;
        writeln!(w)?;
        w.flush()?;
    }
    eprintln!(
        "J={} edge_cut={} max_imbalance={:.5} balanced={} time={:.1}ms",
        record.j, record.edge_cut, record.max_imbalance, stats.balance.is_balanced, record.wall_time_ms
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let eps = parse_ratio(&args.machine.imbalance)?;
    let (graph, hierarchy) = load_machine(&args.machine)?;
    let k = hierarchy.k();
    let file = File::open(&args.mapping).with_context(|| format!("cannot open {}", args.mapping.display()))?;
    let mapping = Mapping::read(BufReader::new(file), k)?;
    if mapping.len() != graph.n() {
        bail!("mapping has {} entries but the graph has {} vertices", mapping.len(), graph.n());
    }
    let j = comm_cost(&graph, &hierarchy, &mapping)?;
    let report = check_balance(&graph, mapping.assignment(), k, &eps)?;
    let weights: Vec<String> = report.block_weights.iter().map(u64::to_string).collect();
    println!("J: {j}");
    println!("J/2: {}", j / 2);
    println!("edge_cut: {}", graph.edge_cut(mapping.assignment()));
    println!("block_weights: {}", weights.join(" "));
    println!("L_max: {}", report.l_max);
    println!("max_imbalance: {:.6}", report.max_imbalance_f64());
    let verdict = if report.is_balanced { "balanced" } else { "unbalanced" };
    println!("verdict: {verdict}, L_max={}", report.l_max);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.hierarchy.len() != args.distance.len() {
        bail!("{} --hierarchy values but {} --distance values", args.hierarchy.len(), args.distance.len());
    }
    parse_ratio(&args.imbalance)?;
    let hierarchies = args
        .hierarchy
        .iter()
        .zip(&args.distance)
        .map(|(h, d)| parse_hierarchy(h, d))
        .collect::<hiermap::Result<Vec<_>>>()?;
    let instances = bench::read_instance_list(&args.instances)?;
    for instance in &instances {
        if !instance.path.is_file() {
            bail!("instance {} does not exist", instance.path.display());
        }
    }
    let plan = BenchPlan {
        instances,
        hierarchies,
        eps_text: args.imbalance.clone(),
        seeds: args.seeds.clone(),
        configs: BenchPlan::configs(&args.strategies, &args.presets, &args.threads),
        jobs: args.jobs,
    };
    eprintln!("running {} configurations", plan.num_runs());
    let rows = bench::run_bench(&plan)?;
    let failures = rows.iter().filter(|r| !r.is_ok()).count();
    with_output(args.output.as_deref(), |w| Ok(bench::write_rows(&rows, w)?))?;
    if let Some(path) = &args.aggregate {
        let agg = bench::aggregate(&rows, args.baseline.as_ref());
        bench::write_rows(&agg, create(path)?)?;
    }
    if failures > 0 {
        eprintln!("warning: {failures} of {} runs failed; see the error column", rows.len());
    }
    Ok(())
}

fn cmd_perfprofile(args: ProfileArgs) -> Result<()> {
    let file = File::open(&args.table).with_context(|| format!("cannot open {}", args.table.display()))?;
    let table = profile::QualityTable::read_csv(BufReader::new(file))?;
    let taus =
        if args.taus.is_empty() { profile::tau_grid(profile::max_ratio(&table), 101) } else { args.taus.clone() };
    if let Some(bad) = taus.iter().find(|t| t.is_nan() || **t < 1.0) {
        bail!("tau values must be at least 1, got {bad}");
    }
    let result = profile::performance_profile(&table, &taus)?;
    for name in &result.excluded {
        eprintln!("warning: instance {name} excluded, some algorithm reports quality 0");
    }
    with_output(args.output.as_deref(), |w| Ok(profile::write_profile_csv(&result, w)?))?;
    if let Some(path) = &args.plot {
        std::fs::write(path, profile::profile_svg(&result))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let eps = parse_ratio(&args.machine.imbalance)?;
    let (graph, hierarchy) = load_machine(&args.machine)?;
    let result = oracle::optimal_mapping(&graph, &hierarchy, &eps)?;
    println!("J: {}", result.cost);
    if let Some(path) = &args.output {
        let mut w = create(path)?;
        result.mapping.write(&mut w)?;
        w.flush()?;
    } else {
        let ids: Vec<String> = result.mapping.assignment().iter().map(usize::to_string).collect();
        println!("mapping: {}", ids.join(" "));
    }
    Ok(())
}
