//! Per-node structural metrics on unweighted undirected graphs.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Degree,
    Clustering,
    Closeness,
    Betweenness,
    Eccentricity,
    Coreness,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Degree,
        Metric::Clustering,
        Metric::Closeness,
        Metric::Betweenness,
        Metric::Eccentricity,
        Metric::Coreness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Degree => "degree",
            Metric::Clustering => "clustering",
            Metric::Closeness => "closeness",
            Metric::Betweenness => "betweenness",
            Metric::Eccentricity => "eccentricity",
            Metric::Coreness => "coreness",
        }
    }

    pub fn compute(self, g: &Graph) -> NodeMetricVector {
        let values = match self {
            Metric::Degree => g.degrees().into_iter().map(|d| d as f64).collect(),
            Metric::Clustering => clustering_all(g),
            Metric::Closeness => closeness_all(g),
            Metric::Betweenness => betweenness_all(g),
            Metric::Eccentricity => eccentricity_all(g).into_iter().map(|e| e as f64).collect(),
            Metric::Coreness => coreness_all(g).into_iter().map(|c| c as f64).collect(),
        };
        NodeMetricVector {
            metric: self,
            values,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown metric {s:?}")))
    }
}

/// Values of one metric for every node of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetricVector {
    pub metric: Metric,
    pub values: Vec<f64>,
}

impl NodeMetricVector {
    /// Constant vectors carry no variance; correlations against them are
    /// undefined.
    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// Local clustering `2 T_i / (k_i (k_i - 1))`, 0 for degree below 2.
pub fn clustering_all(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut mark = vec![false; n];
    let mut out = vec![0.0; n];
    for i in 0..n {
        let nbrs = g.neighbors(i);
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        for &j in nbrs {
            mark[j] = true;
        }
        let mut twice_triangles = 0usize;
        for &j in nbrs {
            twice_triangles += g.neighbors(j).iter().filter(|&&l| mark[l]).count();
        }
        for &j in nbrs {
            mark[j] = false;
        }
        out[i] = twice_triangles as f64 / (k * (k - 1)) as f64;
    }
    out
}

/// BFS distances from `s` into `dist` (`u32::MAX` when unreachable);
/// returns nodes in visit order.
fn bfs(g: &Graph, s: usize, dist: &mut [u32], queue: &mut VecDeque<usize>, order: &mut Vec<usize>) {
    for &v in order.iter() {
        dist[v] = u32::MAX;
    }
    order.clear();
    queue.clear();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let du = dist[u] + 1;
        for &v in g.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = du;
                queue.push_back(v);
            }
        }
    }
}

struct Scratch {
    dist: Vec<u32>,
    queue: VecDeque<usize>,
    order: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![u32::MAX; n],
            queue: VecDeque::new(),
            order: Vec::new(),
        }
    }
}

fn per_source<T: Send>(g: &Graph, f: impl Fn(usize, &Scratch) -> T + Sync) -> Vec<T> {
    let n = g.node_count();
    (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |sc, s| {
                bfs(g, s, &mut sc.dist, &mut sc.queue, &mut sc.order);
                f(s, sc)
            },
        )
        .collect()
}

/// Closeness scaled by the reachable fraction:
/// `(r / (n - 1)) * (r / sum of distances)`, where `r` counts reachable
/// nodes other than the source. Equals `(n - 1) / sum` on connected graphs.
pub fn closeness_all(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    per_source(g, |_, sc| {
        let r = sc.order.len() - 1;
        if r == 0 {
            return 0.0;
        }
        let total: u64 = sc.order.iter().map(|&v| sc.dist[v] as u64).sum();
        (r as f64 / (n - 1) as f64) * (r as f64 / total as f64)
    })
}

/// Largest distance to any node in the same component.
pub fn eccentricity_all(g: &Graph) -> Vec<u32> {
    per_source(g, |_, sc| sc.order.last().map_or(0, |&v| sc.dist[v]))
}

const BETWEENNESS_CHUNK: usize = 64;

/// Shortest-path betweenness (Brandes), endpoints excluded, normalized by
/// the number of node pairs not involving the node, `(n - 1)(n - 2) / 2`.
///
/// Sources are processed in fixed-size chunks that are summed in order, so
/// the result does not depend on the thread count.
pub fn betweenness_all(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let chunks: Vec<usize> = (0..n).step_by(BETWEENNESS_CHUNK).collect();
    let partials: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&start| {
            let mut acc = vec![0.0; n];
            let mut sc = Scratch::new(n);
            let mut sigma = vec![0.0f64; n];
            let mut delta = vec![0.0f64; n];
            for s in start..(start + BETWEENNESS_CHUNK).min(n) {
                bfs(g, s, &mut sc.dist, &mut sc.queue, &mut sc.order);
                for &v in &sc.order {
                    sigma[v] = 0.0;
                    delta[v] = 0.0;
                }
                sigma[s] = 1.0;
                for &u in &sc.order {
                    let du = sc.dist[u];
                    for &v in g.neighbors(u) {
                        if sc.dist[v] == du + 1 {
                            sigma[v] += sigma[u];
                        }
                    }
                }
                for &w in sc.order.iter().rev() {
                    let dw = sc.dist[w];
                    let coeff = (1.0 + delta[w]) / sigma[w];
                    for &v in g.neighbors(w) {
                        if dw > 0 && sc.dist[v] == dw - 1 {
                            delta[v] += sigma[v] * coeff;
                        }
                    }
                    if w != s {
                        acc[w] += delta[w];
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in &partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    // Every unordered pair was counted from both ends.
    let scale = ((n - 1) * (n - 2)) as f64;
    total.iter_mut().for_each(|x| *x /= scale);
    total
}

/// Unnormalized betweenness: expected number of shortest paths through each
/// node summed over unordered pairs.
pub fn betweenness_raw(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let scale = if n < 3 { 0.0 } else { ((n - 1) * (n - 2)) as f64 / 2.0 };
    betweenness_all(g).into_iter().map(|x| x * scale).collect()
}

/// k-core index by bucketed minimum-degree peeling.
pub fn coreness_all(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let mut deg: Vec<usize> = g.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let c = *b;
        *b = start;
        start += c;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                    pos[u] = pw;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg.into_iter().map(|d| d as u32).collect()
}
