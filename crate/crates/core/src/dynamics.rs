//! Walk dynamics expressed as per-step neighbor weights.
//!
//! | rule        | weight of neighbor `j` of current node `i` |
//! |-------------|--------------------------------------------|
//! | `rw`        | 1                                          |
//! | `rwd`       | `k_j`                                      |
//! | `rwid`      | `1 / k_j`                                  |
//! | `tsaw-node` | `exp(-lambda * f_j)`                       |
//! | `tsaw-edge` | `exp(-lambda * f_ij)`                      |
//!
//! `f_j` counts arrivals at `j` and `f_ij` counts traversals of the
//! undirected edge `{i, j}`, both over the current walk only.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsKind {
    Rw,
    Rwd,
    Rwid,
    TsawNode,
    TsawEdge,
}

impl DynamicsKind {
    pub const ALL: [DynamicsKind; 5] = [
        DynamicsKind::Rw,
        DynamicsKind::Rwd,
        DynamicsKind::Rwid,
        DynamicsKind::TsawNode,
        DynamicsKind::TsawEdge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DynamicsKind::Rw => "rw",
            DynamicsKind::Rwd => "rwd",
            DynamicsKind::Rwid => "rwid",
            DynamicsKind::TsawNode => "tsaw-node",
            DynamicsKind::TsawEdge => "tsaw-edge",
        }
    }
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DynamicsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DynamicsKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown dynamics {s:?} (expected rw, rwd, rwid, tsaw-node or tsaw-edge)"
                ))
            })
    }
}

/// Default self-avoidance strength.
pub const DEFAULT_LAMBDA: f64 = std::f64::consts::LN_2;

/// A walk rule plus its avoidance strength (used by the TSAW rules only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub kind: DynamicsKind,
    pub lambda: f64,
}

impl Dynamics {
    pub fn new(kind: DynamicsKind) -> Self {
        Dynamics {
            kind,
            lambda: DEFAULT_LAMBDA,
        }
    }

    pub fn with_lambda(kind: DynamicsKind, lambda: f64) -> Self {
        Dynamics { kind, lambda }
    }
}

impl From<DynamicsKind> for Dynamics {
    fn from(kind: DynamicsKind) -> Self {
        Dynamics::new(kind)
    }
}

/// Memory of one walker.
#[derive(Debug, Clone)]
pub struct WalkerState {
    pub current: NodeId,
    /// Arrivals per node; the start node counts once.
    pub node_visits: Vec<u32>,
    /// Traversals per undirected edge id.
    pub edge_visits: Vec<u32>,
    pub steps_taken: usize,
}

impl WalkerState {
    pub fn start(g: &Graph, at: NodeId) -> Result<Self> {
        g.degree(at)?;
        let mut node_visits = vec![0; g.node_count()];
        node_visits[at] = 1;
        Ok(WalkerState {
            current: at,
            node_visits,
            edge_visits: vec![0; g.edge_count()],
            steps_taken: 0,
        })
    }

    fn advance(&mut self, g: &Graph, slot: usize) {
        let i = self.current;
        let j = g.neighbors(i)[slot];
        self.edge_visits[g.incident_edges(i)[slot]] += 1;
        self.node_visits[j] += 1;
        self.current = j;
        self.steps_taken += 1;
    }
}

/// Unnormalized weights over `neighbors(state.current)`, written into `out`.
fn fill_weights(g: &Graph, s: &WalkerState, d: Dynamics, out: &mut Vec<f64>) {
    let i = s.current;
    let nbrs = g.neighbors(i);
    out.clear();
    match d.kind {
        DynamicsKind::Rw => out.extend(nbrs.iter().map(|_| 1.0)),
        DynamicsKind::Rwd => out.extend(nbrs.iter().map(|&j| g.deg(j) as f64)),
        DynamicsKind::Rwid => out.extend(nbrs.iter().map(|&j| 1.0 / g.deg(j) as f64)),
        DynamicsKind::TsawNode => out.extend(
            nbrs.iter()
                .map(|&j| (-d.lambda * s.node_visits[j] as f64).exp()),
        ),
        DynamicsKind::TsawEdge => out.extend(
            g.incident_edges(i)
                .iter()
                .map(|&e| (-d.lambda * s.edge_visits[e] as f64).exp()),
        ),
    }
}

/// Normalizes in place. Equal weights yield exactly `1 / k`.
fn normalize(w: &mut [f64]) {
    let k = w.len() as f64;
    if w.iter().all(|&x| x == w[0]) {
        w.iter_mut().for_each(|x| *x = 1.0 / k);
        return;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
}

/// Probability of moving to each neighbor of `s.current`, in neighbor order.
pub fn transition_distribution(g: &Graph, s: &WalkerState, d: Dynamics) -> Result<Vec<f64>> {
    if g.degree(s.current)? == 0 {
        return Err(Error::DeadEnd(s.current));
    }
    let mut w = Vec::new();
    fill_weights(g, s, d, &mut w);
    normalize(&mut w);
    Ok(w)
}

/// Ordered visited nodes plus their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSequence {
    pub nodes: Vec<NodeId>,
    pub dynamics: Dynamics,
    pub seed: u64,
    pub graph_ref: String,
}

/// Walker stepping over a shared graph with its own RNG stream.
pub struct Walker<'g, R> {
    graph: &'g Graph,
    dynamics: Dynamics,
    state: WalkerState,
    rng: R,
    weights: Vec<f64>,
}

impl<'g, R: Rng> Walker<'g, R> {
    /// Starts at a node drawn uniformly from `rng`.
    pub fn new(graph: &'g Graph, dynamics: Dynamics, mut rng: R) -> Result<Self> {
        if graph.node_count() == 0 {
            return Err(Error::param("cannot walk on an empty graph"));
        }
        let start = rng.random_range(0..graph.node_count());
        Ok(Walker {
            graph,
            dynamics,
            state: WalkerState::start(graph, start)?,
            rng,
            weights: Vec::new(),
        })
    }

    pub fn state(&self) -> &WalkerState {
        &self.state
    }

    /// Moves to a neighbor by cumulative-sum inversion.
    pub fn step(&mut self) -> Result<NodeId> {
        let i = self.state.current;
        if self.graph.deg(i) == 0 {
            return Err(Error::DeadEnd(i));
        }
        fill_weights(self.graph, &self.state, self.dynamics, &mut self.weights);
        let total: f64 = self.weights.iter().sum();
        let target = self.rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut slot = self.weights.len() - 1;
        for (k, w) in self.weights.iter().enumerate() {
            acc += w;
            if target < acc {
                slot = k;
                break;
            }
        }
        self.state.advance(self.graph, slot);
        Ok(self.state.current)
    }
}

/// Walk of exactly `length` visited nodes (`length - 1` traversals).
pub fn generate_sequence(
    g: &Graph,
    dynamics: Dynamics,
    length: usize,
    seed: u64,
    graph_ref: &str,
) -> Result<WalkSequence> {
    if length == 0 {
        return Err(Error::param("walk length must be at least 1"));
    }
    let mut walker = Walker::new(g, dynamics, seed::rng(seed))?;
    let mut nodes = Vec::with_capacity(length);
    nodes.push(walker.state().current);
    for _ in 1..length {
        nodes.push(walker.step()?);
    }
    Ok(WalkSequence {
        nodes,
        dynamics,
        seed,
        graph_ref: graph_ref.to_string(),
    })
}
