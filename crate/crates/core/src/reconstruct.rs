//! Co-occurrence reconstruction: consecutive symbols of a walk become edges.

use std::collections::HashMap;

use crate::graph::{Graph, NodeId};

/// Graph observed by a walker, with ids assigned in first-visit order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedGraph {
    pub graph: Graph,
    /// Reconstructed id to original id.
    pub to_original: Vec<NodeId>,
    /// Original id to reconstructed id, for visited nodes only.
    pub from_original: HashMap<NodeId, NodeId>,
}

impl ReconstructedGraph {
    /// Treats `g` as its own complete reconstruction (identity maps).
    pub fn identity(g: &Graph) -> Self {
        let n = g.node_count();
        ReconstructedGraph {
            graph: g.clone(),
            to_original: (0..n).collect(),
            from_original: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

/// Links every pair of distinct symbols that are adjacent in `nodes`;
/// repeated pairs collapse into one unweighted edge.
pub fn reconstruct(nodes: &[NodeId]) -> ReconstructedGraph {
    let mut from_original = HashMap::new();
    let mut to_original = Vec::new();
    let mut local = Vec::with_capacity(nodes.len());
    for &x in nodes {
        let id = *from_original.entry(x).or_insert_with(|| {
            to_original.push(x);
            to_original.len() - 1
        });
        local.push(id);
    }
    let edges = local
        .windows(2)
        .filter(|p| p[0] != p[1])
        .map(|p| (p[0], p[1]));
    let (graph, _) = Graph::from_edges(to_original.len(), edges).expect("local ids are dense");
    ReconstructedGraph {
        graph,
        to_original,
        from_original,
    }
}

/// Fraction of `original`'s nodes present in `r`.
pub fn knowledge_fraction(r: &ReconstructedGraph, original: &Graph) -> f64 {
    if original.node_count() == 0 {
        return 0.0;
    }
    r.node_count() as f64 / original.node_count() as f64
}
