//! Configuration-driven sweeps over topologies, dynamics and walk lengths.
//!
//! A run is a pure function of its [`ExperimentConfig`]; worker count only
//! changes wall time. Seeds are derived from `master_seed` and each task's
//! position in the grid:
//!
//! * generator of topology `t`: `[0, t]`
//! * reference communities of edge-list topology `t`: `[2, t]`
//! * walks of topology `t` under dynamics `d`: `[1, t, d]`, then one child
//!   per realization

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{recovery_series, summarize, NmiMode, Original, RecoveryPoint, SeriesSpec, Stat};
use crate::community::detect_communities;
use crate::dynamics::{Dynamics, DynamicsKind, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::generators::{GeneratorSpec, Model};
use crate::graph::Graph;
use crate::io::read_edge_list;
use crate::metrics::Metric;
use crate::partition::Partition;
use crate::seed;

pub const DEFAULT_W_GRID: [usize; 11] = [100, 200, 400, 500, 600, 800, 1000, 2000, 5000, 20000, 50000];

pub const RECORDS_HEADER: [&str; 10] = [
    "topology",
    "dynamics",
    "w",
    "realization",
    "metric",
    "pearson",
    "spearman",
    "knowledge_fraction",
    "nmi",
    "runtime_ms",
];

pub const SUMMARY_HEADER: [&str; 13] = [
    "topology",
    "dynamics",
    "w",
    "metric",
    "realizations",
    "pearson_mean",
    "pearson_std",
    "spearman_mean",
    "spearman_std",
    "knowledge_mean",
    "knowledge_std",
    "nmi_mean",
    "nmi_std",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopologySource {
    Generator { generator: GeneratorSpec },
    EdgeList { edge_list: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub source: TopologySource,
    /// Metrics not reported for this topology.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skip_metrics: Vec<Metric>,
}

impl TopologyConfig {
    pub fn generated(spec: GeneratorSpec) -> Self {
        TopologyConfig {
            name: None,
            source: TopologySource::Generator { generator: spec },
            skip_metrics: Vec::new(),
        }
    }

    pub fn display_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.source {
            TopologySource::Generator { generator } => match generator.model {
                Model::Lfr { mu, .. } => format!("lfr-mu{mu}"),
                ref m => m.name().to_string(),
            },
            TopologySource::EdgeList { edge_list } => edge_list
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| edge_list.display().to_string()),
        }
    }
}

fn default_n() -> usize {
    5000
}
fn default_k() -> f64 {
    4.0
}
fn default_dynamics() -> Vec<DynamicsKind> {
    DynamicsKind::ALL.to_vec()
}
fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}
fn default_grid() -> Vec<usize> {
    DEFAULT_W_GRID.to_vec()
}
fn default_realizations() -> usize {
    20
}
fn default_metrics() -> Vec<Metric> {
    Metric::ALL.to_vec()
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// Experiment description. Every field has a default matching the
/// reference protocol, so `{}` runs ER, BA, Waxman and LFR
/// (mu = 0.05, 0.2, 0.8) at `n` nodes with all dynamics, lengths and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Size used by the default topology list.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k")]
    pub k_avg: f64,
    #[serde(default)]
    pub topologies: Vec<TopologyConfig>,
    #[serde(default = "default_dynamics")]
    pub dynamics: Vec<DynamicsKind>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_grid")]
    pub w_grid: Vec<usize>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    /// Compare communities on LFR (planted) and edge-list (Leiden) graphs.
    #[serde(default = "default_true")]
    pub communities: bool,
    #[serde(default)]
    pub nmi_mode: NmiMode,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub parallelism: Option<usize>,
    /// Fill `runtime_ms`. Off by default because timings make the records
    /// file differ between runs.
    #[serde(default)]
    pub record_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative edge-list paths resolve against the
    /// file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for t in &mut cfg.topologies {
            if let TopologySource::EdgeList { edge_list } = &mut t.source {
                if edge_list.is_relative() {
                    *edge_list = base.join(&*edge_list);
                }
            }
        }
        Ok(cfg)
    }

    /// Configured topologies, or the reference set when none are listed.
    pub fn resolved_topologies(&self) -> Vec<TopologyConfig> {
        if !self.topologies.is_empty() {
            return self.topologies.clone();
        }
        let (n, k) = (self.n, self.k_avg);
        let mut list = vec![
            TopologyConfig::generated(GeneratorSpec { model: Model::Er, n, k_avg: k, seed: None }),
            TopologyConfig::generated(GeneratorSpec {
                model: Model::Ba { attachments: None },
                n,
                k_avg: k,
                seed: None,
            }),
            TopologyConfig::generated(GeneratorSpec {
                model: Model::Waxman {
                    alpha: crate::generators::DEFAULT_WAXMAN_ALPHA,
                    beta: None,
                },
                n,
                k_avg: k,
                seed: None,
            }),
        ];
        for mu in [0.05, 0.2, 0.8] {
            list.push(TopologyConfig::generated(GeneratorSpec {
                model: Model::Lfr {
                    communities: 5,
                    t1: 3.0,
                    t2: 0.0,
                    mu,
                },
                n,
                k_avg: k,
                seed: None,
            }));
        }
        list
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.w_grid.is_empty() || self.w_grid[0] == 0 {
            return bad("w_grid must be nonempty with lengths >= 1");
        }
        if self.w_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("w_grid must be strictly ascending");
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1");
        }
        if self.dynamics.is_empty() {
            return bad("dynamics list is empty");
        }
        if self.metrics.is_empty() {
            return bad("metrics list is empty");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be a finite non-negative number");
        }
        if self.parallelism == Some(0) {
            return bad("parallelism must be at least 1");
        }
        let names: Vec<String> = self.resolved_topologies().iter().map(|t| t.display_name()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Config(format!("duplicate topology name {n:?}")));
            }
        }
        Ok(())
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub topology: String,
    pub dynamics: DynamicsKind,
    pub w: usize,
    pub realization: usize,
    pub metric: Metric,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub knowledge_fraction: f64,
    pub nmi: Option<f64>,
    pub runtime_ms: Option<f64>,
}

/// A topology ready for walking: largest component plus its reference
/// communities when it has any.
pub struct PreparedTopology {
    pub name: String,
    pub graph: Graph,
    pub reference: Option<Partition>,
    pub metrics: Vec<Metric>,
}

pub fn prepare_topology(cfg: &ExperimentConfig, index: usize, t: &TopologyConfig) -> Result<PreparedTopology> {
    let name = t.display_name();
    let wrap = |e: Error| Error::Config(format!("topology {name:?}: {e}"));
    let (graph, reference) = match &t.source {
        TopologySource::Generator { generator } => {
            let mut spec = generator.clone();
            spec.seed.get_or_insert(seed::derive_path(cfg.master_seed, &[0, index as u64]));
            let generated = spec.generate().map_err(wrap)?;
            let (lcc, map) = generated.graph.largest_connected_component();
            let reference = match (cfg.communities, generated.partition) {
                (true, Some(p)) => Some(p.restrict(&map).map_err(wrap)?),
                _ => None,
            };
            (lcc, reference)
        }
        TopologySource::EdgeList { edge_list } => {
            let lg = read_edge_list(edge_list).map_err(wrap)?;
            let (lcc, _) = lg.graph.largest_connected_component();
            if lcc.edge_count() == 0 {
                return Err(wrap(Error::param("graph has no edges")));
            }
            let reference = cfg
                .communities
                .then(|| detect_communities(&lcc, seed::derive_path(cfg.master_seed, &[2, index as u64])));
            (lcc, reference)
        }
    };
    let metrics = cfg
        .metrics
        .iter()
        .copied()
        .filter(|m| !t.skip_metrics.contains(m))
        .collect();
    Ok(PreparedTopology {
        name,
        graph,
        reference,
        metrics,
    })
}

fn dynamics_index(kind: DynamicsKind) -> u64 {
    DynamicsKind::ALL.iter().position(|&d| d == kind).unwrap() as u64
}

fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let topologies = cfg.resolved_topologies();
    let prepared: Vec<PreparedTopology> = topologies
        .par_iter()
        .enumerate()
        .map(|(i, t)| prepare_topology(cfg, i, t))
        .collect::<Result<_>>()?;
    let originals: Vec<Original<'_>> = prepared
        .par_iter()
        .map(|p| Original::new(&p.graph, &p.metrics, p.reference.clone()))
        .collect();

    let tasks: Vec<(usize, DynamicsKind)> = (0..prepared.len())
        .flat_map(|t| cfg.dynamics.iter().map(move |&d| (t, d)))
        .collect();
    let results: Vec<Vec<ExperimentRecord>> = tasks
        .par_iter()
        .map(|&(t, kind)| {
            let spec = SeriesSpec {
                dynamics: Dynamics::with_lambda(kind, cfg.lambda),
                w_grid: cfg.w_grid.clone(),
                realizations: cfg.realizations,
                seed: seed::derive_path(cfg.master_seed, &[1, t as u64, dynamics_index(kind)]),
                nmi_mode: cfg.nmi_mode,
            };
            let points = recovery_series(&originals[t], &spec)
                .map_err(|e| Error::Config(format!("topology {:?}, {kind}: {e}", prepared[t].name)))?;
            Ok(points
                .into_iter()
                .map(|p| to_record(&prepared[t].name, kind, p, cfg.record_timings))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

fn to_record(topology: &str, dynamics: DynamicsKind, p: RecoveryPoint, timings: bool) -> ExperimentRecord {
    ExperimentRecord {
        topology: topology.to_string(),
        dynamics,
        w: p.w,
        realization: p.realization,
        metric: p.correlation.metric,
        pearson: p.correlation.pearson,
        spearman: p.correlation.spearman,
        knowledge_fraction: p.knowledge,
        nmi: p.nmi,
        runtime_ms: timings.then_some(p.elapsed.as_secs_f64() * 1e3),
    }
}

/// Runs the sweep and returns rows ordered by topology, dynamics (config
/// order), `w`, realization and metric.
pub fn run_records(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_grid(cfg))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_csv(records: &[ExperimentRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record([
            r.topology.clone(),
            r.dynamics.to_string(),
            r.w.to_string(),
            r.realization.to_string(),
            r.metric.to_string(),
            opt(r.pearson),
            opt(r.spearman),
            r.knowledge_fraction.to_string(),
            opt(r.nmi),
            opt(r.runtime_ms),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Config(e.to_string()))?).expect("utf-8"))
}

/// Mean and standard deviation over realizations for every
/// `(topology, dynamics, w, metric)` cell.
pub fn summary_csv(records: &[ExperimentRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    let mut start = 0;
    while start < records.len() {
        let key = (&records[start].topology, records[start].dynamics);
        let end = records[start..]
            .iter()
            .position(|r| (&r.topology, r.dynamics) != key)
            .map_or(records.len(), |p| start + p);
        let points: Vec<RecoveryPoint> = records[start..end]
            .iter()
            .map(|r| RecoveryPoint {
                w: r.w,
                realization: r.realization,
                knowledge: r.knowledge_fraction,
                correlation: crate::analysis::CorrelationResult {
                    metric: r.metric,
                    pearson: r.pearson,
                    spearman: r.spearman,
                    n_matched: 0,
                },
                nmi: r.nmi,
                elapsed: Default::default(),
            })
            .collect();
        for s in summarize(&points) {
            let stat = |st: Stat| [opt(st.mean), opt(st.std)];
            let mut row = vec![
                key.0.clone(),
                key.1.to_string(),
                s.w.to_string(),
                s.metric.to_string(),
                s.realizations.to_string(),
            ];
            row.extend(stat(s.pearson));
            row.extend(stat(s.spearman));
            row.extend(stat(s.knowledge));
            row.extend(stat(s.nmi));
            w.write_record(row)?;
        }
        start = end;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Config(e.to_string()))?).expect("utf-8"))
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
    pub rows: usize,
}

/// Runs the configured sweep and writes `records.csv` and `summary.csv`
/// into `output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let records = run_records(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records_path = dir.join("records.csv");
    let summary_path = dir.join("summary.csv");
    crate::io::write_text(&records_path, &records_csv(&records)?)?;
    crate::io::write_text(&summary_path, &summary_csv(&records)?)?;
    Ok(ExperimentOutput {
        records_path,
        summary_path,
        rows: records.len(),
    })
}
