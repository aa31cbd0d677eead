//! Leiden community detection optimizing modularity at resolution 1.
//!
//! Each pass runs fast local moving, refines every community by merging
//! singletons only into well-connected subsets, and aggregates on the
//! refined partition while keeping the unrefined one as the starting point
//! on the aggregate. Passes repeat from the previous result until
//! modularity stops increasing.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::partition::Partition;
use crate::seed;

const MAX_PASSES: usize = 100;
/// Randomness of refinement merges.
const THETA: f64 = 0.01;
const RESOLUTION: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct LeidenResult {
    pub partition: Partition,
    pub modularity: f64,
    /// Modularity of the starting singletons followed by the value after
    /// every accepted pass.
    pub history: Vec<f64>,
}

/// Weighted graph used internally; aggregation turns communities into
/// nodes and their internal weight into self-loops.
#[derive(Clone)]
struct Network {
    adj: Vec<Vec<(usize, f64)>>,
    /// Self-loop weight, counted once.
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    total: f64,
}

impl Network {
    fn from_graph(g: &Graph) -> Self {
        let n = g.node_count();
        let adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
            .collect();
        let strength: Vec<f64> = (0..n).map(|i| g.deg(i) as f64).collect();
        Network {
            adj,
            self_loop: vec![0.0; n],
            total: strength.iter().sum(),
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses nodes by `membership` (contiguous ids `0..count`).
    fn aggregate(&self, membership: &[usize], count: usize) -> Network {
        let mut self_loop = vec![0.0; count];
        let mut strength = vec![0.0; count];
        let mut weights: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
        for v in 0..self.len() {
            let c = membership[v];
            strength[c] += self.strength[v];
            self_loop[c] += self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                let d = membership[u];
                if d == c {
                    // Seen from both ends.
                    self_loop[c] += 0.5 * w;
                } else {
                    weights[c].push((d, w));
                }
            }
        }
        let adj = weights
            .into_iter()
            .map(|mut list| {
                list.sort_unstable_by_key(|&(d, _)| d);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(list.len());
                for (d, w) in list {
                    match merged.last_mut() {
                        Some((last, acc)) if *last == d => *acc += w,
                        _ => merged.push((d, w)),
                    }
                }
                merged
            })
            .collect();
        Network {
            adj,
            self_loop,
            strength,
            total: self.total,
        }
    }
}

/// Sparse accumulator of edge weight from one node to each community.
struct Tally {
    weight: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            weight: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, c: usize, w: f64) {
        if !self.seen[c] {
            self.seen[c] = true;
            self.touched.push(c);
        }
        self.weight[c] += w;
    }

    fn clear(&mut self) {
        for &c in &self.touched {
            self.weight[c] = 0.0;
            self.seen[c] = false;
        }
        self.touched.clear();
    }
}

/// Modularity of `p` on `g`.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = p.community_count();
    let mut internal = vec![0.0; k];
    let mut strength = vec![0.0; k];
    for &(u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u)] += 1.0;
        }
    }
    for i in 0..g.node_count() {
        strength[p.community_of(i)] += g.deg(i) as f64;
    }
    (0..k)
        .map(|c| internal[c] / m - RESOLUTION * (strength[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Queue-based local moving. Returns whether any node changed community.
fn move_nodes(net: &Network, membership: &mut [usize], rng: &mut ChaCha8Rng) -> bool {
    let n = net.len();
    let two_m = net.total;
    let mut comm_strength = vec![0.0; n];
    let mut comm_size = vec![0usize; n];
    for v in 0..n {
        comm_strength[membership[v]] += net.strength[v];
        comm_size[membership[v]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).filter(|&c| comm_size[c] == 0).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut queue: VecDeque<usize> = order.into();
    let mut queued = vec![true; n];
    let mut tally = Tally::new(n);
    let mut changed = false;

    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let old = membership[v];
        let kv = net.strength[v];
        comm_strength[old] -= kv;
        comm_size[old] -= 1;
        if comm_size[old] == 0 {
            empty.push(old);
        }
        for &(u, w) in &net.adj[v] {
            tally.add(membership[u], w);
        }
        let gain = |c: usize, w: f64| w - RESOLUTION * kv * comm_strength[c] / two_m;
        let mut best = old;
        let mut best_gain = gain(old, tally.weight[old]);
        for &c in &tally.touched {
            let g = gain(c, tally.weight[c]);
            if g > best_gain {
                best = c;
                best_gain = g;
            }
        }
        if best_gain < 0.0 {
            // An empty community has gain exactly 0.
            best = *empty.last().expect("v's own community is empty or one exists");
        }
        tally.clear();
        if comm_size[best] == 0 {
            let pos = empty.iter().rposition(|&c| c == best).unwrap();
            empty.swap_remove(pos);
        }
        comm_strength[best] += kv;
        comm_size[best] += 1;
        membership[v] = best;
        if best != old {
            changed = true;
            for &(u, _) in &net.adj[v] {
                if !queued[u] && membership[u] != best {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    changed
}

/// Refines each community of `membership` starting from singletons.
/// Returns refined labels (ids `< n`).
fn refine(net: &Network, membership: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = net.len();
    let two_m = net.total;
    let mut comm_strength = vec![0.0; n];
    for v in 0..n {
        comm_strength[membership[v]] += net.strength[v];
    }
    // Weight from each node to the rest of its own community.
    let inside: Vec<f64> = (0..n)
        .map(|v| {
            net.adj[v]
                .iter()
                .filter(|&&(u, _)| membership[u] == membership[v])
                .map(|&(_, w)| w)
                .sum()
        })
        .collect();

    let mut refined: Vec<usize> = (0..n).collect();
    let mut ref_strength = net.strength.clone();
    let mut ref_size = vec![1usize; n];
    // Weight from each refined subset to the rest of its community.
    let mut cut = inside.clone();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut tally = Tally::new(n);
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for v in order {
        if ref_size[refined[v]] != 1 {
            continue;
        }
        let kv = net.strength[v];
        let big = comm_strength[membership[v]];
        if inside[v] < RESOLUTION * kv * (big - kv) / two_m {
            continue;
        }
        let own = refined[v];
        ref_strength[own] = 0.0;
        ref_size[own] = 0;
        for &(u, w) in &net.adj[v] {
            if membership[u] == membership[v] {
                tally.add(refined[u], w);
            }
        }
        candidates.clear();
        candidates.push((own, 0.0));
        for &t in &tally.touched {
            let well_connected = cut[t] >= RESOLUTION * ref_strength[t] * (big - ref_strength[t]) / two_m;
            if !well_connected {
                continue;
            }
            let g = tally.weight[t] - RESOLUTION * kv * ref_strength[t] / two_m;
            if g >= 0.0 {
                candidates.push((t, g));
            }
        }
        let top = candidates.iter().map(|&(_, g)| g).fold(0.0, f64::max);
        let probs: Vec<f64> = candidates.iter().map(|&(_, g)| ((g - top) / THETA).exp()).collect();
        let total: f64 = probs.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut chosen = candidates[candidates.len() - 1].0;
        for (&(t, _), p) in candidates.iter().zip(&probs) {
            if target < *p {
                chosen = t;
                break;
            }
            target -= p;
        }
        if chosen != own {
            cut[chosen] += inside[v] - 2.0 * tally.weight[chosen];
        }
        tally.clear();
        refined[v] = chosen;
        ref_strength[chosen] += kv;
        ref_size[chosen] += 1;
    }
    refined
}

fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let p = Partition::from_labels(labels);
    let k = p.community_count();
    (p.membership().to_vec(), k)
}

/// One multi-level pass starting from `start` (labels on the nodes of `g`).
fn pass(base: &Network, start: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut net = base.clone();
    let mut membership = renumber(start).0;
    // Aggregate node holding each original node.
    let mut node_of: Vec<usize> = (0..base.len()).collect();
    loop {
        move_nodes(&net, &mut membership, rng);
        let (m, count) = renumber(&membership);
        membership = m;
        if count == net.len() {
            break;
        }
        let (refined, ref_count) = renumber(&refine(&net, &membership, rng));
        if ref_count == net.len() {
            break;
        }
        let next = net.aggregate(&refined, ref_count);
        let mut next_membership = vec![0; ref_count];
        for v in 0..net.len() {
            next_membership[refined[v]] = membership[v];
        }
        for x in node_of.iter_mut() {
            *x = refined[*x];
        }
        net = next;
        membership = next_membership;
    }
    node_of.iter().map(|&a| membership[a]).collect()
}

pub fn leiden(g: &Graph, seed: u64) -> LeidenResult {
    let mut rng = seed::rng(seed);
    let base = Network::from_graph(g);
    let mut best = Partition::singletons(g.node_count());
    let mut history = vec![modularity(g, &best)];
    if g.edge_count() == 0 {
        return LeidenResult {
            partition: best,
            modularity: history[0],
            history,
        };
    }
    for _ in 0..MAX_PASSES {
        let labels = pass(&base, best.membership(), &mut rng);
        let candidate = Partition::from_labels(&labels);
        let q = modularity(g, &candidate);
        if q <= *history.last().unwrap() + 1e-12 {
            break;
        }
        best = candidate;
        history.push(q);
    }
    LeidenResult {
        modularity: *history.last().unwrap(),
        partition: best,
        history,
    }
}

/// Leiden partition of `g`.
pub fn detect_communities(g: &Graph, seed: u64) -> Partition {
    leiden(g, seed).partition
}
