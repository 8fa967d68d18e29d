//! Immutable simple undirected graphs over dense `0..n` node indices.

use crate::error::{Error, Result};

/// Dense 0-based node index. External labels are mapped in [`crate::io`].
pub type NodeId = usize;

/// A simple undirected graph: no self-loops, no multi-edges.
///
/// Neighbor lists are kept sorted, so equality of two graphs is equality of
/// their edge sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicates (in either orientation)
    /// collapse; self-loops and out-of-range endpoints are errors.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Self {
            adjacency,
            edge_count: twice / 2,
        })
    }

    pub fn empty(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn complete(node_count: usize) -> Self {
        let adjacency = (0..node_count)
            .map(|u| (0..node_count).filter(|&v| v != u).collect())
            .collect();
        Self {
            adjacency,
            edge_count: node_count * node_count.saturating_sub(1) / 2,
        }
    }

    pub fn path(node_count: usize) -> Self {
        let edges = (1..node_count).map(|v| (v - 1, v));
        Self::new(node_count, edges).expect("path edges are valid")
    }

    /// Star with node 0 as center and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count(),
            })
        }
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.check(v)?;
        Ok(self.adjacency[v].len())
    }

    #[inline]
    pub(crate) fn deg(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// All degrees in node order.
    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(&self.adjacency[v])
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.adjacency[u].binary_search(&v).is_ok())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `nodes` (treated as a set). Nodes are re-indexed in
    /// ascending original order; the returned table maps new index to
    /// original index.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<(Graph, Vec<NodeId>)> {
        let mut remap: Vec<NodeId> = nodes.to_vec();
        remap.sort_unstable();
        remap.dedup();
        for &v in &remap {
            self.check(v)?;
        }
        let mut position = vec![usize::MAX; self.node_count()];
        for (new, &old) in remap.iter().enumerate() {
            position[old] = new;
        }
        let mut adjacency = Vec::with_capacity(remap.len());
        let mut twice = 0;
        for &old in &remap {
            let list: Vec<NodeId> = self.adjacency[old]
                .iter()
                .filter_map(|&w| (position[w] != usize::MAX).then_some(position[w]))
                .collect();
            twice += list.len();
            adjacency.push(list);
        }
        Ok((
            Graph {
                adjacency,
                edge_count: twice / 2,
            },
            remap,
        ))
    }

    /// Number of edges among the neighbors of `v`.
    pub(crate) fn neighbor_links(&self, v: NodeId) -> usize {
        let nbrs = &self.adjacency[v];
        let mut links = 0;
        for (i, &a) in nbrs.iter().enumerate() {
            let adj_a = &self.adjacency[a];
            // both lists sorted: count common elements greater than a
            let rest = &nbrs[i + 1..];
            let (mut x, mut y) = (0, adj_a.partition_point(|&w| w <= a));
            while x < rest.len() && y < adj_a.len() {
                match rest[x].cmp(&adj_a[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        links += 1;
                        x += 1;
                        y += 1;
                    }
                }
            }
        }
        links
    }
}
