use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Hard assignment of every node to one community.
///
/// Community ids are contiguous `0..count` and numbered in order of first
/// appearance when scanning nodes by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    membership: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Normalizes arbitrary labels into a partition.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut remap = std::collections::HashMap::new();
        let mut membership = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = remap.len();
            membership.push(*remap.entry(l).or_insert(next));
        }
        Partition {
            count: remap.len(),
            membership,
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            membership: (0..n).collect(),
            count: n,
        }
    }

    pub fn single_block(n: usize) -> Partition {
        Partition {
            membership: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn community_of(&self, i: NodeId) -> usize {
        self.membership[i]
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.count];
        for &c in &self.membership {
            s[c] += 1;
        }
        s
    }

    /// Partition of the nodes listed in `nodes` (ids into `self`), in that
    /// order.
    pub fn restrict(&self, nodes: &[NodeId]) -> Result<Partition> {
        let labels = nodes
            .iter()
            .map(|&i| {
                self.membership.get(i).copied().ok_or(Error::InvalidNode {
                    node: i,
                    n: self.membership.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition::from_labels(&labels))
    }
}
