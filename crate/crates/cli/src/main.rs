use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ks_core::colouring::{candidate_filter, export_dimacs_101, solve_101, FilterResult};
use ks_core::enumerate::{enumerate_with, tickets, Filters, SubtreeTicket, DEFAULT_SPLIT_DEPTH};
use ks_core::graph6;
use ks_core::grid::{generate_grid, grid_embed, DEFAULT_EMBED_NODE_LIMIT};
use ks_core::interval::{
    decide_embeddability, export_polynomial, resume_embeddability, Checkpoint, SolverOptions, Verdict,
};
use ks_core::pipeline::random::{random_graphs, RandomModel};
use ks_core::pipeline::{self, report_counts, verify_known, Flags, JobSpec, RunControl, BUNDLES, DEFAULT_GRID_LADDER};
use ks_core::Graph;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "ks", version, about = "Search for small Kochen-Specker vector systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical graphs on n vertices, one graph6 per line.
    Enumerate(EnumerateArgs),
    /// Colourability flags and a 101-colouring when one exists.
    Colour(GraphsArgs),
    /// Exact embedding on cubic grids.
    EmbedGrid(EmbedGridArgs),
    /// Embeddability over the reals by interval branch-and-prune.
    EmbedInterval(EmbedIntervalArgs),
    /// Enumerate, colour and embed into an on-disk catalog.
    Pipeline(PipelineArgs),
    /// Re-run a bundle of known results.
    VerifyKnown(VerifyArgs),
    /// Per-n counts of a catalog as CSV.
    Report(ReportArgs),
    /// DIMACS CNF of 101-colourability.
    ExportCnf(ExportArgs),
    /// The embedding polynomial in text form.
    ExportPoly(ExportArgs),
    /// Seeded random graphs as graph6.
    Random(RandomArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Vertex count, or a range such as 1..9.
    #[arg(long)]
    n: String,
    /// Comma-separated: connected, square-free, none.
    #[arg(long, default_value = "connected,square-free")]
    filters: String,
    /// Split depth for --list-tickets.
    #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
    tickets_depth: usize,
    /// Print the subtree tickets instead of graphs.
    #[arg(long)]
    list_tickets: bool,
    /// Only the subtree of this ticket (k:hex).
    #[arg(long)]
    ticket: Option<String>,
    /// Print counts instead of graphs.
    #[arg(long)]
    count: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphsArgs {
    /// graph6 strings; read from stdin when absent.
    graphs: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedGridArgs {
    graphs: Vec<String>,
    /// Grid parameters to try in order, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    grid_n: Vec<u32>,
    /// Node limit per graph and grid.
    #[arg(long, default_value_t = DEFAULT_EMBED_NODE_LIMIT)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedIntervalArgs {
    graph: String,
    /// Contraction steps.
    #[arg(long, default_value_t = SolverOptions::default().budget)]
    budget: u64,
    #[arg(long, default_value_t = SolverOptions::default().delta)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Continue from a checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Where to write the checkpoint of an inconclusive run.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-check every refutation in exact arithmetic.
    #[arg(long)]
    shadow: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "connected,square-free")]
    filters: String,
    #[arg(long, value_delimiter = ',')]
    grid_n: Vec<u32>,
    #[arg(long, default_value_t = pipeline::DEFAULT_INTERVAL_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = SolverOptions::default().delta)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
    tickets_depth: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    resume: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Stop after starting this many tickets.
    #[arg(long, hide = true)]
    max_tickets: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Bundle name, or `all`.
    name: String,
    /// Write the JSON reports here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Catalog file or pipeline output directory.
    catalog: PathBuf,
    #[arg(long, default_value_t = 30)]
    extrapolate_to: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    graph: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gnp,
    SquareFree,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Model::SquareFree)]
    model: Model,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let parse = |t: &str| t.trim().parse::<usize>().with_context(|| format!("bad vertex count {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

fn read_graphs(args: &[String]) -> Result<Vec<Graph>> {
    let lines: Vec<String> =
        if args.is_empty() { io::stdin().lock().lines().collect::<io::Result<_>>()? } else { args.to_vec() };
    lines
        .iter()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty())
        .map(|l| graph6::decode(l).with_context(|| format!("graph6 {l:?}")))
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_lines(values: impl IntoIterator<Item = serde_json::Value>) -> String {
    values.into_iter().map(|v| v.to_string() + "\n").collect()
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<u8> {
    let (lo, hi) = parse_range(&a.n)?;
    let filters: Filters = a.filters.parse()?;
    let ticket = a.ticket.as_deref().map(|t| SubtreeTicket::parse(t, filters)).transpose()?;
    let mut text = String::new();
    for n in lo..=hi {
        if a.list_tickets {
            for t in tickets(n, a.tickets_depth, filters) {
                text.push_str(&format!("{n} {t}\n"));
            }
        } else if a.count {
            let mut c = 0u64;
            enumerate_with(n, filters, ticket.as_ref(), |_| c += 1)?;
            text.push_str(&format!("{n} {c}\n"));
        } else {
            enumerate_with(n, filters, ticket.as_ref(), |g| {
                text.push_str(&graph6::encode(g));
                text.push('\n');
            })?;
        }
    }
    emit(&a.out, &text)?;
    Ok(0)
}

fn cmd_colour(a: GraphsArgs) -> Result<u8> {
    let graphs = read_graphs(&a.graphs)?;
    let lines = graphs.iter().map(|g| {
        let flags = Flags::of(g);
        let filter = match candidate_filter(g) {
            FilterResult::Pass => "pass".to_string(),
            FilterResult::Reject(r) => r.to_string(),
        };
        serde_json::json!({
            "graph6": graph6::encode(g),
            "flags": flags,
            "filter": filter,
            "colouring_101": solve_101(g).witness().map(|w| w.to_json()),
        })
    });
    emit(&a.out, &json_lines(lines))?;
    Ok(0)
}

fn cmd_embed_grid(a: EmbedGridArgs) -> Result<u8> {
    let ladder = if a.grid_n.is_empty() { DEFAULT_GRID_LADDER.to_vec() } else { a.grid_n };
    let grids = ladder.iter().map(|&n| generate_grid(n)).collect::<ks_core::Result<Vec<_>>>()?;
    let mut lines = Vec::new();
    for g in read_graphs(&a.graphs)? {
        let mut result = serde_json::json!({ "graph6": graph6::encode(&g), "embedding": null });
        for sys in &grids {
            result["tried"] = sys.n().into();
            if let Some(e) = grid_embed(&g, sys, a.budget)?.embedding() {
                result["embedding"] = e.to_json();
                break;
            }
        }
        lines.push(result);
    }
    emit(&a.out, &json_lines(lines))?;
    Ok(0)
}

fn cmd_embed_interval(a: EmbedIntervalArgs) -> Result<u8> {
    let g = graph6::decode(a.graph.trim())?;
    let opts = SolverOptions {
        budget: a.budget,
        delta: a.delta,
        workers: a.workers,
        shadow_check: a.shadow,
        ..SolverOptions::default()
    };
    let verdict = match &a.resume {
        Some(p) => {
            let ck: Checkpoint =
                serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?;
            resume_embeddability(&g, &ck, &opts)?
        }
        None => decide_embeddability(&g, &opts)?,
    };
    println!("{}", serde_json::to_string_pretty(&verdict.to_json(&opts))?);
    if let (Some(ck), Some(out)) = (Checkpoint::new(&g, &opts, &verdict), &a.out) {
        fs::write(out, serde_json::to_string(&ck)?).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(if matches!(verdict, Verdict::Inconclusive { .. }) { EXIT_INCONCLUSIVE } else { 0 })
}

fn cmd_pipeline(a: PipelineArgs) -> Result<u8> {
    let (lo, hi) = parse_range(&a.n)?;
    let mut spec = JobSpec::new(lo, hi, a.out);
    spec.filters = a.filters.parse()?;
    if !a.grid_n.is_empty() {
        spec.grid_ladder = a.grid_n;
    }
    spec.interval_budget = a.budget;
    spec.delta = a.delta;
    spec.tickets_depth = a.tickets_depth;
    spec.workers = a.workers;
    let summary = pipeline::run_search(&spec, a.resume, RunControl { max_tickets: a.max_tickets })?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if summary.failed.is_empty() { 0 } else { EXIT_VERIFY })
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let names: Vec<&str> = if a.name == "all" { BUNDLES.to_vec() } else { vec![a.name.as_str()] };
    let mut reports = Vec::new();
    let mut ok = true;
    for name in names {
        let r = verify_known(name)?;
        for c in &r.checks {
            println!("{} {name}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        ok &= r.passed();
        reports.push(r);
    }
    if let Some(out) = &a.out {
        fs::write(out, serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(if ok { 0 } else { EXIT_VERIFY })
}

fn cmd_report(a: ReportArgs) -> Result<u8> {
    let records = pipeline::load_catalog(&a.catalog)?;
    emit(&a.out, &report_counts(&records, a.extrapolate_to)?)?;
    Ok(0)
}

fn export(a: ExportArgs, f: impl Fn(&Graph) -> String) -> Result<u8> {
    let g = graph6::decode(a.graph.trim())?;
    emit(&a.out, &f(&g))?;
    Ok(0)
}

fn cmd_random(a: RandomArgs) -> Result<u8> {
    let model = match a.model {
        Model::Gnp => RandomModel::Gnp,
        Model::SquareFree => RandomModel::SquareFree,
    };
    let graphs = random_graphs(a.n, a.count, a.seed, model)?;
    emit(&a.out, &graphs.iter().map(|g| graph6::encode(g) + "\n").collect::<String>())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Enumerate(a) => cmd_enumerate(a),
        Cmd::Colour(a) => cmd_colour(a),
        Cmd::EmbedGrid(a) => cmd_embed_grid(a),
        Cmd::EmbedInterval(a) => cmd_embed_interval(a),
        Cmd::Pipeline(a) => cmd_pipeline(a),
        Cmd::VerifyKnown(a) => cmd_verify(a),
        Cmd::Report(a) => cmd_report(a),
        Cmd::ExportCnf(a) => export(a, export_dimacs_101),
        Cmd::ExportPoly(a) => export(a, |g| export_polynomial(g).to_text()),
        Cmd::Random(a) => cmd_random(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
