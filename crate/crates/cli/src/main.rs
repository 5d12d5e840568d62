use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crossgraph::analysis::{city_report, Mode, ReportRow};
use crossgraph::generate;
use crossgraph::graph::{EmbeddedGraph, VertexId};
use crossgraph::io::{edges_tsv, load_network, nodes_tsv, Format, Scale};
use crossgraph::planarize::{check_planarization_size, planarize, Planarization};
use crossgraph::routing::{build_oracle, shortest_path, RouteError};
use crossgraph::separators::{build_hierarchy, verify_hierarchy, SeparatorHierarchy, DEFAULT_LEAF_SIZE};
use crossgraph::sweep::{find_crossings, sweep, CrossingSet, Strictness};

#[derive(Parser)]
#[command(name = "crossgraph", version, about = "Crossing analysis, planarization and routing for embedded road networks")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find all crossings.
    Crossings(CrossingsArgs),
    /// Eight-column crossing-graph row plus auxiliary counts.
    Stats(StatsArgs),
    /// Insert crossing vertices and write the planar graph.
    Planarize(PlanarizeArgs),
    /// Build and verify a separator hierarchy.
    Hierarchy(HierarchyArgs),
    /// Shortest path between two vertices.
    Route(RouteArgs),
    /// Write a synthetic network.
    Generate(GenerateArgs),
    /// Run every structural check on a network.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Input {
    /// Node file (TSV: id, x, y).
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Edge file (TSV or GeoJSON).
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "tsv")]
    format: Format,
    /// Coordinate multiplier, a power of ten.
    #[arg(long, default_value = "1e7")]
    scale: Scale,
    /// Reject drawings that are not nice.
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Report violations and continue (default).
    #[arg(long)]
    lenient: bool,
}

impl Input {
    fn strictness(&self) -> Strictness {
        if self.strict {
            Strictness::Strict
        } else {
            Strictness::Lenient
        }
    }
}

#[derive(Args)]
struct CrossingsArgs {
    #[command(flatten)]
    input: Input,
    /// Directory for crossings.tsv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "all")]
    mode: Mode,
    /// Print JSON instead of TSV.
    #[arg(long)]
    json: bool,
    /// Directory for stats.tsv and stats.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanarizeArgs {
    #[command(flatten)]
    input: Input,
    /// Directory for nodes.tsv, edges.tsv, vertex_map.tsv and edge_map.tsv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HierarchyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = DEFAULT_LEAF_SIZE, value_parser = positive)]
    leaf_size: usize,
    /// Directory for hierarchy.json; printed to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Baseline,
    Oracle,
}

#[derive(Args)]
struct RouteArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, value_enum, default_value = "baseline")]
    engine: Engine,
    #[arg(long, default_value_t = DEFAULT_LEAF_SIZE, value_parser = positive)]
    leaf_size: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    Soup,
    OnePlanar,
    Triangulation,
    Dense,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    seed: u64,
    /// Grid width (grid, one-planar).
    #[arg(long, default_value_t = 10)]
    width: usize,
    /// Grid height (grid, one-planar).
    #[arg(long, default_value_t = 10)]
    height: usize,
    /// Random chords added to the grid.
    #[arg(long, default_value_t = 0)]
    chords: usize,
    /// Vertices (triangulation, dense).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Edges (soup, dense).
    #[arg(long, default_value_t = 500)]
    m: usize,
    /// Segments per soup polyline, at most.
    #[arg(long, default_value_t = 5)]
    max_segments: usize,
    /// Probability that a cell gets crossing diagonals (one-planar).
    #[arg(long, default_value_t = 0.3)]
    prob: f64,
    /// Coordinate multiplier used when writing.
    #[arg(long, default_value = "1")]
    scale: Scale,
    /// Directory for nodes.tsv and edges.tsv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = DEFAULT_LEAF_SIZE, value_parser = positive)]
    leaf_size: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

/// A failure with its exit code: 1 input, 2 invariant, 3 embedding.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

fn invariant_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

type Outcome = Result<(), Failure>;

fn load(input: &Input) -> Result<EmbeddedGraph, Failure> {
    let g = load_network(input.nodes.as_deref(), &input.edges, input.format, input.scale).map_err(input_error)?;
    let normal = g.normalize();
    if normal.edge_count() != g.edge_count() {
        log::warn!("dropped {} loop or parallel edge(s)", g.edge_count() - normal.edge_count());
    }
    Ok(normal)
}

fn crossings(g: &EmbeddedGraph, strictness: Strictness) -> Result<CrossingSet, Failure> {
    find_crossings(g, strictness).map_err(|e| {
        for v in &e.violations {
            eprintln!("{v}");
        }
        Failure { code: 3, error: anyhow!(e) }
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Outcome {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).map_err(input_error)?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display())).map_err(input_error)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn cmd_crossings(args: &CrossingsArgs) -> Outcome {
    let g = load(&args.input)?;
    let xs = crossings(&g, args.input.strictness())?;
    let summary = json!({
        "roads": g.edge_count(),
        "crossing_pairs": xs.pair_count(),
        "crossings": xs.len(),
        "crossing_points": xs.distinct_points().len(),
        "planar": xs.is_empty(),
    });
    if let Some(dir) = &args.out {
        write(dir, "crossings.tsv", &xs.to_tsv())?;
    }
    print!("{}", pretty(&summary));
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Outcome {
    let g = load(&args.input)?;
    let xs = crossings(&g, args.input.strictness())?;
    let (report, _) = city_report(&g, &xs, args.mode).map_err(input_error)?;
    let tsv = format!("{}\n{}\n", ReportRow::tsv_header(), report.row.to_tsv());
    let doc = pretty(&serde_json::to_value(&report).expect("report serializes"));
    if let Some(dir) = &args.out {
        write(dir, "stats.tsv", &tsv)?;
        write(dir, "stats.json", &doc)?;
    }
    print!("{}", if args.json { doc } else { tsv });
    Ok(())
}

fn planarized(input: &Input) -> Result<(EmbeddedGraph, CrossingSet, Planarization), Failure> {
    let g = load(input)?;
    let xs = crossings(&g, input.strictness())?;
    let pl = planarize(&g, &xs).map_err(invariant_error)?;
    if !pl.identities_hold() {
        return Err(invariant_error(anyhow!("planarization vertex or edge count is off")));
    }
    Ok((g, xs, pl))
}

fn cmd_planarize(args: &PlanarizeArgs) -> Outcome {
    let (_, _, pl) = planarized(&args.input)?;
    let scale = args.input.scale;
    write(&args.out, "nodes.tsv", &nodes_tsv(&pl.pgraph, scale))?;
    write(&args.out, "edges.tsv", &edges_tsv(&pl.pgraph, scale))?;
    write(&args.out, "vertex_map.tsv", &pl.vertex_map_tsv())?;
    write(&args.out, "edge_map.tsv", &pl.edge_map_tsv())?;
    let summary = json!({
        "vertices": pl.pgraph.vertex_count(),
        "edges": pl.pgraph.edge_count(),
        "artificial": pl.artificial_count(),
    });
    print!("{}", pretty(&summary));
    Ok(())
}

fn hierarchy_checked(g: &EmbeddedGraph, pl: &Planarization, leaf_size: usize) -> Result<SeparatorHierarchy, Failure> {
    let h = build_hierarchy(pl, leaf_size);
    let report = verify_hierarchy(&h, pl, g);
    if !report.passed() {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("{} failed at node {}: {}", c.name, c.node.unwrap_or(0), c.detail);
        }
        return Err(invariant_error(anyhow!("separator hierarchy failed verification")));
    }
    Ok(h)
}

fn cmd_hierarchy(args: &HierarchyArgs) -> Outcome {
    let (g, _, pl) = planarized(&args.input)?;
    let h = hierarchy_checked(&g, &pl, args.leaf_size)?;
    let doc = pretty(&h.to_json(&pl));
    match &args.out {
        Some(dir) => {
            write(dir, "hierarchy.json", &doc)?;
            print!("{}", pretty(&json!({ "nodes": h.nodes.len(), "depth": h.depth(), "leaf_size": h.leaf_size })));
        }
        None => print!("{doc}"),
    }
    Ok(())
}

fn cmd_route(args: &RouteArgs) -> Outcome {
    let (from, to) = (VertexId(args.from), VertexId(args.to));
    let (result, engine, elapsed) = match args.engine {
        Engine::Baseline => {
            let g = load(&args.input)?;
            let start = Instant::now();
            let r = shortest_path(&g, from, to);
            (r, "baseline", start.elapsed())
        }
        Engine::Oracle => {
            let (g, _, pl) = planarized(&args.input)?;
            let h = hierarchy_checked(&g, &pl, args.leaf_size)?;
            let oracle = build_oracle(&g, &h).map_err(invariant_error)?;
            let start = Instant::now();
            let r = oracle.query(from, to);
            (r, "oracle", start.elapsed())
        }
    };
    let doc = match result {
        Ok(r) => json!({
            "distance": r.distance.to_exact_string(),
            "path": r.path.iter().map(|v| v.0).collect::<Vec<_>>(),
            "edges": r.edges.iter().map(|e| e.0).collect::<Vec<_>>(),
            "engine": engine,
            "elapsed": elapsed.as_secs_f64(),
        }),
        Err(RouteError::Unreachable { .. }) => json!({
            "distance": null,
            "path": [],
            "edges": [],
            "engine": engine,
            "elapsed": elapsed.as_secs_f64(),
        }),
        Err(e @ RouteError::UnknownVertex(_)) => return Err(input_error(e)),
        Err(e) => return Err(invariant_error(e)),
    };
    print!("{}", pretty(&doc));
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Outcome {
    let g = match args.kind {
        Kind::Grid => generate::grid_with_chords(args.width, args.height, args.chords, args.seed),
        Kind::Soup => generate::segment_soup(args.m, args.max_segments, 1000, args.seed),
        Kind::OnePlanar => generate::one_planar(args.width, args.height, args.prob, args.seed),
        Kind::Triangulation => generate::random_triangulation(args.n, args.seed),
        Kind::Dense => generate::dense_straight_line(args.n, args.m, args.seed),
    };
    write(&args.out, "nodes.tsv", &nodes_tsv(&g, args.scale))?;
    write(&args.out, "edges.tsv", &edges_tsv(&g, args.scale))?;
    print!("{}", pretty(&json!({ "vertices": g.vertex_count(), "edges": g.edge_count() })));
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let g = load(&args.input)?;
    let report = sweep(&g);
    let nice = report.violations.is_empty();
    if !nice && args.input.strictness() == Strictness::Strict {
        for v in &report.violations {
            eprintln!("{v}");
        }
        return Err(Failure { code: 3, error: anyhow!("{} embedding violation(s)", report.violations.len()) });
    }
    let xs = report.crossings;
    let mut checks: Vec<(&str, bool, String)> = vec![("nice-embedding", nice, format!("{} violation(s)", report.violations.len()))];

    let (city, comps) = city_report(&g, &xs, Mode::All).map_err(input_error)?;
    checks.push((
        "few-crossings",
        city.few_crossings_holds,
        format!("{} crossing pairs, degeneracy {} x {} roads", city.row.crossings, city.row.degeneracy, city.row.roads),
    ));
    checks.push(("report-accounting", city.accounting_holds(&comps), city.row.to_tsv()));

    let pl = planarize(&g, &xs).map_err(invariant_error)?;
    checks.push(("planarization-counts", pl.identities_hold(), format!("{} artificial vertices", pl.artificial_count())));
    if nice {
        let residual = sweep(&pl.pgraph).crossings.len();
        checks.push(("planarization-planar", residual == 0, format!("{residual} crossings left")));
        let size = check_planarization_size(&pl, city.row.degeneracy);
        checks.push(("planarization-size", size.ok, format!("ratio {:.3}, bound {:.3}", size.ratio, size.bound)));
    }

    let h = build_hierarchy(&pl, args.leaf_size);
    let hr = verify_hierarchy(&h, &pl, &g);
    for c in &hr.checks {
        let detail = if c.passed { String::new() } else { format!("node {}: {}", c.node.unwrap_or(0), c.detail) };
        checks.push((c.name, c.passed, detail));
    }

    let mut ok = true;
    for (name, passed, detail) in &checks {
        ok &= passed;
        println!("{}\t{name}\t{detail}", if *passed { "ok" } else { "FAIL" });
    }
    if ok {
        Ok(())
    } else {
        Err(invariant_error(anyhow!("some checks failed")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            log::warn!("cannot set worker count: {e}");
        }
    }
    let outcome = match &cli.command {
        Command::Crossings(a) => cmd_crossings(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Planarize(a) => cmd_planarize(a),
        Command::Hierarchy(a) => cmd_hierarchy(a),
        Command::Route(a) => cmd_route(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
