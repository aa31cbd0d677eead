//! Immutable undirected simple graphs in compressed adjacency form.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Dense node index, valid within the graph that produced it.
pub type NodeId = usize;

/// Undirected, unweighted simple graph on nodes `0..n`.
///
/// Adjacency is stored in CSR form with neighbors sorted ascending. Every
/// undirected edge has an id in `0..m`; both half-edges carry the same id so
/// per-edge state (e.g. traversal counters) is symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    edge_ids: Vec<usize>,
    edges: Vec<(NodeId, NodeId)>,
}

/// What [`Graph::from_edges`] discarded while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a simple graph on `n` nodes. Self-loops and repeated edges are
    /// dropped and counted.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, Dropped)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut dropped = Dropped::default();
        let mut list = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidNode { node: x, n });
                }
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        dropped.duplicates = before - list.len();
        Ok((Graph::from_sorted_unique(n, list), dropped))
    }

    /// Like [`Graph::from_edges`] but expects a simple edge set already.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<(NodeId, NodeId)>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * edges.len()];
        let mut edge_ids = vec![0; 2 * edges.len()];
        // Edges are sorted by (min, max), so each node's neighbor slice is
        // filled in ascending order: first the smaller endpoints (from edges
        // where the node is the max, scanned in min order), then the larger.
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[v]] = u;
            edge_ids[cursor[v]] = id;
            cursor[v] += 1;
        }
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u]] = v;
            edge_ids[cursor[u]] = id;
            cursor[u] += 1;
        }
        Graph {
            offsets,
            neighbors,
            edge_ids,
            edges,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node: i,
                n: self.node_count(),
            })
        }
    }

    /// Degree of `i`, checked.
    pub fn degree(&self, i: NodeId) -> Result<usize> {
        self.check(i)?;
        Ok(self.deg(i))
    }

    #[inline]
    pub(crate) fn deg(&self, i: NodeId) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sorted neighbors of `i`. Panics if `i` is out of range.
    #[inline]
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, i: NodeId) -> &[usize] {
        &self.edge_ids[self.offsets[i]..self.offsets[i + 1]]
    }

    /// All edges as `(u, v)` with `u < v`, sorted; the position is the edge id.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.deg(i)).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.node_count() as f64
        }
    }

    /// Component label per node; labels are assigned in order of each
    /// component's smallest node id.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().1 == 1
    }

    /// Subgraph induced by `keep` (ascending original ids). Returns the
    /// subgraph and the map from its ids to ids of `self`.
    pub fn induced(&self, keep: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (j, &i) in keep.iter().enumerate() {
            new_id[i] = j;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|&(u, v)| (new_id[u], new_id[v]))
            .collect::<Vec<_>>();
        let (g, _) = Graph::from_edges(keep.len(), edges).expect("ids are in range");
        (g, keep.to_vec())
    }

    /// Largest connected component with the map from its ids to ids of
    /// `self`. Ties go to the component holding the lowest node id.
    pub fn largest_connected_component(&self) -> (Graph, Vec<NodeId>) {
        let (label, count) = self.components();
        let mut size = vec![0usize; count];
        for &c in &label {
            size[c] += 1;
        }
        let mut best = 0;
        for c in 1..count {
            if size[c] > size[best] {
                best = c;
            }
        }
        let keep: Vec<NodeId> = (0..self.node_count()).filter(|&i| label[i] == best).collect();
        if keep.len() == self.node_count() {
            return (self.clone(), keep);
        }
        self.induced(&keep)
    }
}
