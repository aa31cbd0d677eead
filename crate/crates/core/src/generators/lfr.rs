//! Simplified LFR benchmark: power-law degrees, equal planted communities,
//! and separate configuration-model matching of intra- and inter-community
//! stubs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GeneratorSpec, Model};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partition::Partition;
use crate::seed;

const MIN_DEGREE: usize = 2;
const MAX_SWEEPS: usize = 100;
const MEAN_TOLERANCE: f64 = 0.05;

pub fn gen_lfr(spec: &GeneratorSpec) -> Result<(Graph, Partition)> {
    spec.validate()?;
    let (communities, t1, mu) = match spec.model {
        Model::Lfr {
            communities, t1, mu, ..
        } => (communities, t1, mu),
        _ => return Err(Error::param("gen_lfr needs an lfr spec")),
    };
    let n = spec.n;
    let mut rng = seed::rng(spec.seed());

    let mut degree = power_law_degrees(n, spec.k_avg, t1, &mut rng)?;
    if degree.iter().sum::<usize>() % 2 == 1 {
        let i = (0..n).min_by_key(|&i| degree[i]).unwrap();
        degree[i] += 1;
    }

    // Flat community size distribution: contiguous blocks whose sizes
    // differ by at most one.
    let membership: Vec<usize> = (0..n).map(|i| i * communities / n).collect();
    let mut size = vec![0usize; communities];
    for &c in &membership {
        size[c] += 1;
    }

    // Stochastic rounding keeps E[internal] = (1 - mu) k exactly.
    let mut internal: Vec<usize> = (0..n)
        .map(|i| {
            let x = (1.0 - mu) * degree[i] as f64;
            let base = x.floor();
            let k_in = base as usize + usize::from(rng.random::<f64>() < x - base);
            k_in.min(degree[i]).min(size[membership[i]] - 1)
        })
        .collect();
    // Each community needs an even number of internal stubs; the odd one out
    // becomes an external stub.
    let mut parity = vec![0usize; communities];
    for i in 0..n {
        parity[membership[i]] += internal[i];
    }
    for (c, total) in parity.iter().enumerate() {
        if total % 2 == 1 {
            let i = (0..n)
                .filter(|&i| membership[i] == c && internal[i] > 0)
                .max_by_key(|&i| (internal[i], std::cmp::Reverse(i)))
                .expect("odd total implies a node with internal stubs");
            internal[i] -= 1;
        }
    }

    let mut existing: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut edges = Vec::new();
    for c in 0..communities {
        let stubs: Vec<NodeId> = (0..n)
            .filter(|&i| membership[i] == c)
            .flat_map(|i| std::iter::repeat_n(i, internal[i]))
            .collect();
        edges.extend(match_stubs(stubs, |_, _| true, &mut existing, &mut rng)?);
    }
    let stubs: Vec<NodeId> = (0..n)
        .flat_map(|i| std::iter::repeat_n(i, degree[i] - internal[i]))
        .collect();
    edges.extend(match_stubs(
        stubs,
        |u, v| membership[u] != membership[v],
        &mut existing,
        &mut rng,
    )?);

    let (graph, _) = Graph::from_edges(n, edges)?;
    Ok((graph, Partition::from_labels(&membership)))
}

/// Integer degrees from a power law with exponent `t1`, clamped to
/// `[2, sqrt(n k_avg)]`. The lower cutoff of the continuous law is bisected
/// until the sample mean is as close to `k_avg` as possible.
fn power_law_degrees(n: usize, k_avg: f64, t1: f64, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let x_max = (n as f64 * k_avg).sqrt();
    let cap = (x_max.floor() as usize).max(MIN_DEGREE);
    let u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let sample = |x_min: f64| -> Vec<usize> {
        let a = x_min.powf(1.0 - t1);
        let b = x_max.powf(1.0 - t1);
        u.iter()
            .map(|&u| {
                let x = (a + u * (b - a)).powf(1.0 / (1.0 - t1));
                (x.round() as usize).clamp(MIN_DEGREE, cap)
            })
            .collect()
    };
    let mean = |d: &[usize]| d.iter().sum::<usize>() as f64 / d.len() as f64;

    let mut lo = 1e-3_f64.min(x_max);
    let mut hi = x_max;
    let mut best = sample(lo);
    let mut best_err = (mean(&best) - k_avg).abs();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let d = sample(mid);
        let m = mean(&d);
        let err = (m - k_avg).abs();
        if err < best_err {
            best_err = err;
            best = d;
        }
        if m < k_avg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_err > MEAN_TOLERANCE * k_avg {
        return Err(Error::Generation(format!(
            "cannot reach mean degree {k_avg} with degrees in [{MIN_DEGREE}, {cap}]"
        )));
    }
    Ok(best)
}

/// Pairs stubs uniformly at random, rejecting self-loops, repeated edges and
/// pairs failing `allowed`. Rejected stubs are reshuffled together with the
/// stubs of an equal number of randomly released accepted edges.
fn match_stubs(
    mut pending: Vec<NodeId>,
    allowed: impl Fn(NodeId, NodeId) -> bool,
    existing: &mut HashSet<(NodeId, NodeId)>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(NodeId, NodeId)>> {
    let mut accepted: Vec<(NodeId, NodeId)> = Vec::with_capacity(pending.len() / 2);
    for _ in 0..=MAX_SWEEPS {
        pending.shuffle(rng);
        let mut rejected = Vec::new();
        for pair in pending.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u != v && allowed(u, v) && !existing.contains(&(u, v)) {
                existing.insert((u, v));
                accepted.push((u, v));
            } else {
                rejected.push(u);
                rejected.push(v);
            }
        }
        if rejected.is_empty() {
            return Ok(accepted);
        }
        let release = (rejected.len() / 2).min(accepted.len());
        for _ in 0..release {
            let k = rng.random_range(0..accepted.len());
            let (u, v) = accepted.swap_remove(k);
            existing.remove(&(u, v));
            rejected.push(u);
            rejected.push(v);
        }
        pending = rejected;
    }
    Err(Error::Generation(format!(
        "stub matching left {} stubs unmatched after {MAX_SWEEPS} sweeps",
        pending.len()
    )))
}

/// Mean over nodes with at least one edge of the fraction of their edges
/// that leave their community.
pub fn mixing_fraction(g: &Graph, partition: &Partition) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..g.node_count() {
        let nbrs = g.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let out = nbrs
            .iter()
            .filter(|&&j| partition.community_of(j) != partition.community_of(i))
            .count();
        total += out as f64 / nbrs.len() as f64;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}
