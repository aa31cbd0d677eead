use rand::Rng;

use super::{GeneratorSpec, Model};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Preferential attachment grown from a clique of `m + 1` nodes; every new
/// node links to `m` distinct existing nodes chosen proportionally to their
/// current degree.
pub fn gen_ba(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let m = match spec.model {
        Model::Ba {
            attachments: Some(m),
        } => m,
        _ => (spec.k_avg / 2.0).round() as usize,
    };
    if m < 1 {
        return Err(Error::param("BA needs at least one attachment per node"));
    }
    let n = spec.n;
    if n <= m {
        return Err(Error::param(format!("BA needs n > m, got n={n}, m={m}")));
    }
    let mut rng = seed::rng(spec.seed());
    let mut edges = Vec::with_capacity(m * n);
    // Each node appears once per incident edge, so a uniform draw from this
    // list picks node j with probability k_j / sum(k).
    let mut endpoints = Vec::with_capacity(2 * m * n);
    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for new in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                rng.random_range(0..new)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(n, edges))
}
