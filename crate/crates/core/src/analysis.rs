//! Comparing reconstructions against their originals: matched-node
//! correlations, partition similarity and recovery series over walk length.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::detect_communities;
use crate::dynamics::{Dynamics, Walker};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{Metric, NodeMetricVector};
use crate::partition::Partition;
use crate::reconstruct::{knowledge_fraction, reconstruct, ReconstructedGraph};
use crate::seed;

/// Pearson product-moment correlation; `None` when either input is
/// constant or shorter than 2.
///
/// Panics if the lengths differ.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson needs equal-length inputs");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1; ties share their mean rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "spearman needs equal-length inputs");
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub metric: Metric,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub n_matched: usize,
}

impl CorrelationResult {
    pub fn is_defined(&self) -> bool {
        self.pearson.is_some() && self.spearman.is_some()
    }
}

/// Correlates `recon` (values on `r`'s nodes) with `original` (values on
/// the original graph) over exactly the nodes of `r`.
pub fn correlate_matched(
    metric: Metric,
    original: &[f64],
    r: &ReconstructedGraph,
    recon: &[f64],
) -> CorrelationResult {
    let aligned: Vec<f64> = r.to_original.iter().map(|&o| original[o]).collect();
    CorrelationResult {
        metric,
        pearson: pearson(recon, &aligned),
        spearman: spearman(recon, &aligned),
        n_matched: r.node_count(),
    }
}

pub fn matched_metric_correlation(g: &Graph, r: &ReconstructedGraph, metric: Metric) -> CorrelationResult {
    let original = metric.compute(g);
    let recon = metric.compute(&r.graph);
    correlate_matched(metric, &original.values, r, &recon.values)
}

fn entropy(sizes: impl Iterator<Item = usize>, n: f64) -> f64 {
    sizes
        .filter(|&s| s > 0)
        .map(|s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2 I(p; q) / (H(p) + H(q))` between two
/// hard partitions of the same nodes. Identical partitions (up to labels)
/// give exactly 1.
pub fn nmi(p: &Partition, q: &Partition) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::param(format!(
            "partitions cover different node sets ({} vs {} nodes)",
            p.len(),
            q.len()
        )));
    }
    // Both are normalized by first appearance, so equality up to a label
    // permutation is plain equality.
    if p.membership() == q.membership() {
        return Ok(1.0);
    }
    let n = p.len() as f64;
    let hp = entropy(p.sizes().into_iter(), n);
    let hq = entropy(q.sizes().into_iter(), n);
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&a, &b) in p.membership().iter().zip(q.membership()) {
        *joint.entry((a, b)).or_default() += 1;
    }
    let ps = p.sizes();
    let qs = q.sizes();
    let mut mi = 0.0;
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    for ((a, b), c) in cells {
        let pab = c as f64 / n;
        mi += pab * (pab * n * n / (ps[a] as f64 * qs[b] as f64)).ln();
    }
    if hp + hq == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * mi / (hp + hq)).clamp(0.0, 1.0))
}

/// How unseen original nodes enter the partition comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NmiMode {
    /// Compare on recovered nodes only.
    #[default]
    Restrict,
    /// Compare on all original nodes, unseen ones as singletons on the
    /// reconstructed side.
    UnseenSingletons,
}

/// NMI between a reference partition of the original graph and a partition
/// of the reconstruction `r`.
pub fn community_nmi(
    reference: &Partition,
    r: &ReconstructedGraph,
    recon: &Partition,
    mode: NmiMode,
) -> Result<f64> {
    match mode {
        NmiMode::Restrict => nmi(&reference.restrict(&r.to_original)?, recon),
        NmiMode::UnseenSingletons => {
            let mut next = recon.community_count();
            let labels: Vec<usize> = (0..reference.len())
                .map(|o| match r.from_original.get(&o) {
                    Some(&i) => recon.community_of(i),
                    None => {
                        next += 1;
                        next - 1
                    }
                })
                .collect();
            nmi(reference, &Partition::from_labels(&labels))
        }
    }
}

/// Original graph with its metric vectors computed once.
pub struct Original<'g> {
    pub graph: &'g Graph,
    pub metrics: Vec<NodeMetricVector>,
    /// Reference communities; `None` for graphs without community structure.
    pub reference: Option<Partition>,
}

impl<'g> Original<'g> {
    pub fn new(graph: &'g Graph, metrics: &[Metric], reference: Option<Partition>) -> Self {
        Original {
            graph,
            metrics: metrics.iter().map(|m| m.compute(graph)).collect(),
            reference,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub dynamics: Dynamics,
    pub w_grid: Vec<usize>,
    pub realizations: usize,
    pub seed: u64,
    pub nmi_mode: NmiMode,
}

/// One `(w, realization, metric)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPoint {
    pub w: usize,
    pub realization: usize,
    pub knowledge: f64,
    pub correlation: CorrelationResult,
    pub nmi: Option<f64>,
    /// Time spent reconstructing and measuring this `(w, realization)`.
    pub elapsed: Duration,
}

/// Seed of the walk for one realization.
pub fn realization_seed(series_seed: u64, realization: usize) -> u64 {
    seed::derive(series_seed, realization as u64)
}

/// Runs `realizations` walks of length `max(w_grid)` and evaluates every
/// prefix length in the grid. Output is ordered by `(w, realization)` and
/// then by the order of `original.metrics`.
pub fn recovery_series(original: &Original<'_>, spec: &SeriesSpec) -> Result<Vec<RecoveryPoint>> {
    let mut grid = spec.w_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::param("walk-length grid must be nonempty with lengths >= 1"));
    }
    if spec.realizations == 0 {
        return Err(Error::param("need at least one realization"));
    }
    let max_w = *grid.last().unwrap();
    let per_realization: Vec<Vec<RecoveryPoint>> = (0..spec.realizations)
        .into_par_iter()
        .map(|real| {
            let walk_seed = realization_seed(spec.seed, real);
            let mut walker = Walker::new(original.graph, spec.dynamics, seed::rng(walk_seed))?;
            let mut nodes = Vec::with_capacity(max_w);
            nodes.push(walker.state().current);
            while nodes.len() < max_w {
                nodes.push(walker.step()?);
            }
            let mut out = Vec::with_capacity(grid.len() * original.metrics.len());
            for &w in &grid {
                let t0 = Instant::now();
                let r = reconstruct(&nodes[..w]);
                let knowledge = knowledge_fraction(&r, original.graph);
                let nmi = match &original.reference {
                    Some(reference) => {
                        let p = detect_communities(&r.graph, seed::derive(walk_seed, w as u64));
                        Some(community_nmi(reference, &r, &p, spec.nmi_mode)?)
                    }
                    None => None,
                };
                let correlations: Vec<CorrelationResult> = original
                    .metrics
                    .iter()
                    .map(|ov| {
                        let rv = ov.metric.compute(&r.graph);
                        correlate_matched(ov.metric, &ov.values, &r, &rv.values)
                    })
                    .collect();
                let elapsed = t0.elapsed();
                out.extend(correlations.into_iter().map(|correlation| RecoveryPoint {
                    w,
                    realization: real,
                    knowledge,
                    correlation,
                    nmi,
                    elapsed,
                }));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut points: Vec<RecoveryPoint> = per_realization.into_iter().flatten().collect();
    // Stable: keeps metric order within each cell.
    points.sort_by_key(|p| (p.w, p.realization));
    Ok(points)
}

/// Mean and sample standard deviation of the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Stat {
        let v: Vec<f64> = values.into_iter().flatten().collect();
        let count = v.len();
        if count == 0 {
            return Stat::default();
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let std = (count >= 2).then(|| {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        });
        Stat {
            count,
            mean: Some(mean),
            std,
        }
    }
}

/// Realization aggregate of one `(w, metric)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub w: usize,
    pub metric: Metric,
    pub realizations: usize,
    pub pearson: Stat,
    pub spearman: Stat,
    pub knowledge: Stat,
    pub nmi: Stat,
}

/// Groups points by `(w, metric)` in first-seen order and averages over
/// realizations; undefined values are skipped.
pub fn summarize(points: &[RecoveryPoint]) -> Vec<SeriesSummary> {
    let mut order: Vec<(usize, Metric)> = Vec::new();
    let mut groups: HashMap<(usize, Metric), Vec<&RecoveryPoint>> = HashMap::new();
    for p in points {
        let key = (p.w, p.correlation.metric);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(p);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            SeriesSummary {
                w: key.0,
                metric: key.1,
                realizations: g.len(),
                pearson: Stat::of(g.iter().map(|p| p.correlation.pearson)),
                spearman: Stat::of(g.iter().map(|p| p.correlation.spearman)),
                knowledge: Stat::of(g.iter().map(|p| Some(p.knowledge))),
                nmi: Stat::of(g.iter().map(|p| p.nmi)),
            }
        })
        .collect()
}
