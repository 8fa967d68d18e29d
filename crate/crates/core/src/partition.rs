use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Assignment of every node to exactly one community, with community ids
/// dense from 0 in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    assignment: Vec<usize>,
    community_count: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    assignment: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;
    fn try_from(repr: PartitionRepr) -> Result<Self> {
        Ok(Partition::from_labels(&repr.assignment))
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            assignment: p.assignment,
        }
    }
}

impl Partition {
    /// Re-indexes arbitrary community labels densely.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut dense = HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|&label| {
                let next = dense.len();
                *dense.entry(label).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            community_count: dense.len(),
        }
    }

    /// Builds a partition of `0..node_count` from a node → community map.
    /// Every node must be assigned.
    pub fn from_assignment(node_count: usize, map: &HashMap<NodeId, usize>) -> Result<Self> {
        if let Some(&node) = map.keys().find(|&&v| v >= node_count) {
            return Err(Error::NodeOutOfRange { node, node_count });
        }
        let labels = (0..node_count)
            .map(|v| map.get(&v).copied().ok_or(Error::MissingNode(v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_labels(&labels))
    }

    /// Every node in one community.
    pub fn single(node_count: usize) -> Self {
        Self {
            assignment: vec![0; node_count],
            community_count: usize::from(node_count > 0),
        }
    }

    /// Every node in its own community.
    pub fn singletons(node_count: usize) -> Self {
        Self {
            assignment: (0..node_count).collect(),
            community_count: node_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn community_of(&self, v: NodeId) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member lists, each sorted ascending, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub(crate) fn check_covers(&self, node_count: usize) -> Result<()> {
        if self.node_count() == node_count {
            Ok(())
        } else if self.node_count() < node_count {
            Err(Error::MissingNode(self.node_count()))
        } else {
            Err(Error::NodeOutOfRange {
                node: node_count,
                node_count,
            })
        }
    }
}
