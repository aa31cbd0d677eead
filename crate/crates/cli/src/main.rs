//! `netwalk`: generate graphs, walk them, rebuild them from walks and
//! measure how much of the original structure survives.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netwalk_core::analysis::matched_metric_correlation;
use netwalk_core::community::leiden;
use netwalk_core::dynamics::{generate_sequence, Dynamics, DynamicsKind, DEFAULT_LAMBDA};
use netwalk_core::experiment::{run_experiment, ExperimentConfig};
use netwalk_core::generators::{GeneratorSpec, Model, DEFAULT_WAXMAN_ALPHA};
use netwalk_core::io::{
    parse_sequence, parse_sequence_csv, read_edge_list, write_edge_list, write_membership_text, write_metric_table,
    write_node_csv, write_sequence, write_sequence_csv, write_text, LabeledGraph,
};
use netwalk_core::metrics::Metric;
use netwalk_core::reconstruct::{reconstruct, ReconstructedGraph};

#[derive(Parser)]
#[command(name = "netwalk", version, about = "Biased random walks and network reconstruction")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "NETWALK_JOBS")]
    jobs: Option<usize>,
    /// Output file, or directory for `experiment` (default: stdout / config).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run a walker on a graph and write the visited sequence.
    Walk(WalkArgs),
    /// Rebuild a graph from a walk sequence by linking consecutive nodes.
    Reconstruct(ReconstructArgs),
    /// Per-node metrics of a graph as CSV.
    Metrics(MetricsArgs),
    /// Correlate node metrics of a reconstruction with its original.
    Correlate(CorrelateArgs),
    /// Leiden communities of a graph as a node,community CSV.
    Communities(GraphArg),
    /// Run a configured sweep and write records.csv and summary.csv.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    Er,
    Ba,
    Wax,
    Lfr,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelName,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 4.0)]
    k_avg: f64,
    /// LFR mixing parameter.
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    /// LFR community count.
    #[arg(long, default_value_t = 5)]
    blocks: usize,
    /// Waxman distance decay.
    #[arg(long, default_value_t = DEFAULT_WAXMAN_ALPHA)]
    alpha: f64,
    /// Waxman density; calibrated to `k_avg` when omitted.
    #[arg(long)]
    beta: Option<f64>,
    /// BA edges per new node (default: round(k_avg / 2)).
    #[arg(long)]
    attachments: Option<usize>,
    /// Also write the planted LFR partition as `node community` lines.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum SequenceFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    dynamics: DynamicsKind,
    #[arg(long)]
    length: usize,
    /// Self-avoidance strength for the TSAW dynamics.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t)]
    format: SequenceFormat,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sequence file; `.csv` files are read as a one-column table.
    #[arg(long)]
    sequence: PathBuf,
}

#[derive(Args)]
struct GraphArg {
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Metrics to compute (repeatable; default: all six).
    #[arg(long = "metric")]
    metrics: Vec<Metric>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    reconstructed: PathBuf,
    /// `reconstructed_label original_label` lines; labels match verbatim
    /// when omitted.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long = "metric")]
    metrics: Vec<Metric>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Fill the runtime_ms column.
    #[arg(long)]
    timings: bool,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn usage(msg: String) -> Failure {
    Failure {
        code: 2,
        error: anyhow::anyhow!(msg),
    }
}

/// Rejects missing input files up front as usage errors.
fn input(path: &Path) -> Result<&Path, Failure> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(usage(format!("no such file: {}", path.display())))
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => write_text(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<LabeledGraph, Failure> {
    Ok(read_edge_list(input(path)?).map_err(anyhow::Error::from)?)
}

fn metric_list(requested: &[Metric]) -> Vec<Metric> {
    if requested.is_empty() {
        Metric::ALL.to_vec()
    } else {
        requested.to_vec()
    }
}

fn generate(common: &Common, a: &GenerateArgs) -> Result<(), Failure> {
    let model = match a.model {
        ModelName::Er => Model::Er,
        ModelName::Ba => Model::Ba {
            attachments: a.attachments,
        },
        ModelName::Wax => Model::Waxman {
            alpha: a.alpha,
            beta: a.beta,
        },
        ModelName::Lfr => Model::Lfr {
            communities: a.blocks,
            t1: 3.0,
            t2: 0.0,
            mu: a.mu,
        },
    };
    let spec = GeneratorSpec::new(model, a.n, a.k_avg, common.seed.unwrap_or(0));
    let generated = spec.generate().map_err(anyhow::Error::from)?;
    let lg = LabeledGraph::numbered(generated.graph);
    emit(common.output.as_deref(), &lg.to_edge_list())?;
    if let Some(path) = &a.partition {
        let Some(p) = generated.partition else {
            return Err(usage("--partition requires --model lfr".into()));
        };
        write_text(path, &write_membership_text(&lg.labels, p.membership())).map_err(anyhow::Error::from)?;
    }
    Ok(())
}

fn walk(common: &Common, a: &WalkArgs) -> Result<(), Failure> {
    let full = load(&a.graph)?;
    let lg = full.largest_connected_component();
    if lg.graph.node_count() < full.graph.node_count() {
        eprintln!(
            "note: walking the largest component ({} of {} nodes)",
            lg.graph.node_count(),
            full.graph.node_count()
        );
    }
    let dynamics = Dynamics::with_lambda(a.dynamics, a.lambda);
    let graph_ref = a.graph.display().to_string();
    let seq = generate_sequence(&lg.graph, dynamics, a.length, common.seed.unwrap_or(0), &graph_ref)
        .map_err(anyhow::Error::from)?;
    let text = match a.format {
        SequenceFormat::Text => write_sequence(&seq, &lg.labels),
        SequenceFormat::Csv => write_sequence_csv(&seq, &lg.labels),
    };
    emit(common.output.as_deref(), &text)?;
    Ok(())
}

fn reconstruct_cmd(common: &Common, a: &ReconstructArgs) -> Result<(), Failure> {
    let path = input(&a.sequence)?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let labels = if path.extension().is_some_and(|e| e == "csv") {
        parse_sequence_csv(&text)
    } else {
        parse_sequence(&text).map(|(labels, _)| labels)
    }
    .with_context(|| format!("parsing {}", path.display()))?;
    if labels.is_empty() {
        return Err(anyhow::anyhow!("{}: sequence is empty", path.display()).into());
    }
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let symbols: Vec<usize> = labels
        .iter()
        .map(|l| {
            *ids.entry(l.as_str()).or_insert_with(|| {
                names.push(l.clone());
                names.len() - 1
            })
        })
        .collect();
    let r = reconstruct(&symbols);
    let out_labels: Vec<String> = r.to_original.iter().map(|&i| names[i].clone()).collect();
    emit(common.output.as_deref(), &write_edge_list(&r.graph, &out_labels))?;
    Ok(())
}

fn metrics_cmd(common: &Common, a: &MetricsArgs) -> Result<(), Failure> {
    let lg = load(&a.graph)?;
    let columns: Vec<_> = metric_list(&a.metrics).into_iter().map(|m| m.compute(&lg.graph)).collect();
    emit(common.output.as_deref(), &write_metric_table(&lg.labels, &columns))?;
    Ok(())
}

fn read_map(path: &Path) -> anyhow::Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(o), None) => {
                map.insert(r.to_string(), o.to_string());
            }
            _ => bail!("{}:{}: expected `reconstructed_label original_label`", path.display(), i + 1),
        }
    }
    Ok(map)
}

fn correlate(common: &Common, a: &CorrelateArgs) -> Result<(), Failure> {
    let original = load(&a.original)?;
    let recon = load(&a.reconstructed)?;
    let map = match &a.map {
        Some(p) => Some(read_map(input(p)?)?),
        None => None,
    };
    let index = original.label_index();
    let mut to_original = Vec::with_capacity(recon.labels.len());
    for label in &recon.labels {
        let target = map.as_ref().map_or(Some(label), |m| m.get(label));
        match target.and_then(|t| index.get(t.as_str())) {
            Some(&i) => to_original.push(i),
            None => {
                return Err(anyhow::anyhow!("node {label:?} of the reconstruction has no counterpart in the original").into())
            }
        }
    }
    let r = ReconstructedGraph {
        graph: recon.graph,
        from_original: to_original.iter().enumerate().map(|(i, &o)| (o, i)).collect(),
        to_original,
    };
    if r.from_original.len() != r.node_count() {
        return Err(anyhow::anyhow!("the map sends two reconstructed nodes to the same original node").into());
    }
    let mut out = String::from("metric,pearson,spearman,n_matched\n");
    let show = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for m in metric_list(&a.metrics) {
        let c = matched_metric_correlation(&original.graph, &r, m);
        out.push_str(&format!("{},{},{},{}\n", m, show(c.pearson), show(c.spearman), c.n_matched));
    }
    emit(common.output.as_deref(), &out)?;
    Ok(())
}

fn communities(common: &Common, a: &GraphArg) -> Result<(), Failure> {
    let lg = load(&a.graph)?;
    let result = leiden(&lg.graph, common.seed.unwrap_or(0));
    eprintln!(
        "{} communities, modularity {:.6}",
        result.partition.community_count(),
        result.modularity
    );
    emit(
        common.output.as_deref(),
        &write_node_csv(&lg.labels, "community", result.partition.membership()),
    )?;
    Ok(())
}

fn experiment(common: &Common, a: &ExperimentArgs) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_file(input(&a.config)?).map_err(anyhow::Error::from)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(jobs) = common.jobs {
        cfg.parallelism = Some(jobs);
    }
    if let Some(dir) = &common.output {
        cfg.output_dir = dir.clone();
    }
    cfg.record_timings |= a.timings;
    let out = run_experiment(&cfg).map_err(anyhow::Error::from)?;
    eprintln!("{} rows written to {}", out.rows, out.records_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    if let (Some(jobs), false) = (common.jobs, matches!(cli.command, Command::Experiment(_))) {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("starting worker pool")?;
    }
    match &cli.command {
        Command::Generate(a) => generate(common, a),
        Command::Walk(a) => walk(common, a),
        Command::Reconstruct(a) => reconstruct_cmd(common, a),
        Command::Metrics(a) => metrics_cmd(common, a),
        Command::Correlate(a) => correlate(common, a),
        Command::Communities(a) => communities(common, a),
        Command::Experiment(a) => experiment(common, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = format!("{:#}", f.error).replace('\n', " ");
            eprintln!("netwalk: error: {msg}");
            ExitCode::from(f.code)
        }
    }
}
