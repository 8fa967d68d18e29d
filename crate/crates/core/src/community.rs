//! Louvain modularity maximization.
//!
//! Two phases per pass: local moving of nodes (seeded shuffled order) until no
//! move gains more than the tolerance, then aggregation of communities into a
//! weighted meta-graph. Passes repeat until modularity stops improving. A final
//! local-moving sweep over the original nodes leaves the result at a fixpoint
//! of single-node moves.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::sampling::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub rng_seed: u64,
    pub max_passes: usize,
    pub min_modularity_gain: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            max_passes: 100,
            min_modularity_gain: 1e-7,
        }
    }
}

impl LouvainConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be at least 1".into()));
        }
        if self.min_modularity_gain.is_nan() || self.min_modularity_gain <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "min_modularity_gain {} must be positive",
                self.min_modularity_gain
            )));
        }
        Ok(())
    }
}

/// Result of a Louvain run with the modularity reached after each pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOutcome {
    pub partition: Partition,
    /// Modularity of the starting singleton partition followed by the value
    /// after every pass (the final entry is after refinement).
    pub pass_modularity: Vec<f64>,
}

/// Weighted graph with self-loops, used at every aggregation level.
#[derive(Debug, Clone)]
struct LevelGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
    total_weight: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Self {
        let adjacency: Vec<Vec<(usize, f64)>> = (0..g.node_count())
            .map(|v| g.neighbors(v).expect("valid node").iter().map(|&u| (u, 1.0)).collect())
            .collect();
        let strength = adjacency.iter().map(|a| a.len() as f64).collect();
        Self {
            adjacency,
            self_loops: vec![0.0; g.node_count()],
            strength,
            total_weight: g.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn modularity(&self, community: &[usize], count: usize) -> f64 {
        let mut internal = vec![0.0; count];
        let mut tot = vec![0.0; count];
        for v in 0..self.len() {
            let c = community[v];
            internal[c] += self.self_loops[v];
            tot[c] += self.strength[v];
            for &(u, w) in &self.adjacency[v] {
                if u > v && community[u] == c {
                    internal[c] += w;
                }
            }
        }
        let m = self.total_weight;
        internal
            .iter()
            .zip(&tot)
            .map(|(l, a)| l / m - (a / (2.0 * m)).powi(2))
            .sum()
    }

    /// Collapses each community into one node. `community` must be dense.
    fn aggregate(&self, community: &[usize], count: usize) -> Self {
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        let mut self_loops = vec![0.0; count];
        for v in 0..self.len() {
            let c = community[v];
            self_loops[c] += self.self_loops[v];
            for &(u, w) in &self.adjacency[v] {
                if u <= v {
                    continue;
                }
                let d = community[u];
                if c == d {
                    self_loops[c] += w;
                } else {
                    *links[c].entry(d).or_insert(0.0) += w;
                    *links[d].entry(c).or_insert(0.0) += w;
                }
            }
        }
        let adjacency: Vec<Vec<(usize, f64)>> = links.into_iter().map(|l| l.into_iter().collect()).collect();
        let strength = adjacency
            .iter()
            .zip(&self_loops)
            .map(|(a, s)| a.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        Self {
            adjacency,
            self_loops,
            strength,
            total_weight: self.total_weight,
        }
    }
}

/// Scratch state for local moving on one level.
struct Mover<'a> {
    graph: &'a LevelGraph,
    community: Vec<usize>,
    tot: Vec<f64>,
    link: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<usize>,
    tolerance: f64,
}

impl<'a> Mover<'a> {
    fn new(graph: &'a LevelGraph, community: Vec<usize>, tolerance: f64) -> Self {
        let mut tot = vec![0.0; graph.len()];
        for (v, &c) in community.iter().enumerate() {
            tot[c] += graph.strength[v];
        }
        Self {
            graph,
            community,
            tot,
            link: vec![0.0; graph.len()],
            seen: vec![false; graph.len()],
            touched: Vec::new(),
            tolerance,
        }
    }

    /// Best destination for `v` (with `v` removed from its community) and the
    /// modularity gain over staying.
    fn best_move(&mut self, v: usize) -> (usize, f64) {
        let g = self.graph;
        let own = self.community[v];
        for &(u, w) in &g.adjacency[v] {
            let c = self.community[u];
            if !self.seen[c] {
                self.seen[c] = true;
                self.touched.push(c);
            }
            self.link[c] += w;
        }
        let k = g.strength[v];
        let m = g.total_weight;
        let tot_own = self.tot[own] - k;
        let gain = |link: f64, tot: f64| link - tot * k / (2.0 * m);
        let stay = gain(self.link[own], tot_own);
        let (mut best, mut best_gain) = (own, stay);
        self.touched.sort_unstable();
        for &c in &self.touched {
            if c == own {
                continue;
            }
            let value = gain(self.link[c], self.tot[c]);
            if value > best_gain || (value == best_gain && c < best) {
                best = c;
                best_gain = value;
            }
        }
        for &c in &self.touched {
            self.link[c] = 0.0;
            self.seen[c] = false;
        }
        self.touched.clear();
        (best, (best_gain - stay) / m)
    }

    /// Sweeps until no node moves; returns whether anything moved.
    fn run(&mut self, order: &[usize]) -> bool {
        let mut any = false;
        loop {
            let mut moved = false;
            for &v in order {
                let (best, delta) = self.best_move(v);
                let own = self.community[v];
                if best != own && delta > self.tolerance {
                    let k = self.graph.strength[v];
                    self.tot[own] -= k;
                    self.tot[best] += k;
                    self.community[v] = best;
                    moved = true;
                }
            }
            if !moved {
                return any;
            }
            any = true;
        }
    }
}

fn densify(labels: &mut [usize]) -> usize {
    let mut index = BTreeMap::new();
    for label in labels.iter_mut() {
        let next = index.len();
        *label = *index.entry(*label).or_insert(next);
    }
    index.len()
}

/// Louvain with the per-pass modularity trace.
pub fn louvain_with_trace(g: &Graph, cfg: &LouvainConfig) -> Result<LouvainOutcome> {
    cfg.validate()?;
    if g.edge_count() == 0 {
        return Err(Error::NoEdges("Louvain partition"));
    }
    let mut rng = RngStream::new(cfg.rng_seed);
    let base = LevelGraph::from_graph(g);
    let n = base.len();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut trace = vec![base.modularity(&membership, n)];

    let mut level = base.clone();
    for _ in 0..cfg.max_passes {
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.shuffle(&mut rng);
        let mut mover = Mover::new(&level, (0..level.len()).collect(), cfg.min_modularity_gain);
        let moved = mover.run(&order);
        let mut community = mover.community;
        let count = densify(&mut community);
        let q = level.modularity(&community, count);
        if !moved || q - trace[trace.len() - 1] <= cfg.min_modularity_gain {
            break;
        }
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        trace.push(q);
        level = level.aggregate(&community, count);
    }

    // refinement over the original nodes
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut mover = Mover::new(&base, membership, cfg.min_modularity_gain);
    if mover.run(&order) {
        let mut community = mover.community;
        let count = densify(&mut community);
        trace.push(base.modularity(&community, count));
        membership = community;
    } else {
        membership = mover.community;
    }

    let mut partition = Partition::from_labels(&membership);
    if *trace.last().expect("trace is non-empty") < 0.0 {
        // the single community scores exactly 0
        partition = Partition::single(n);
        trace.push(0.0);
    }
    Ok(LouvainOutcome {
        partition,
        pass_modularity: trace,
    })
}

pub fn louvain(g: &Graph, cfg: &LouvainConfig) -> Result<Partition> {
    Ok(louvain_with_trace(g, cfg)?.partition)
}

/// Number of nodes that have a single-node move improving modularity by more
/// than `tolerance` under `partition`.
pub fn positive_gain_moves(g: &Graph, partition: &Partition, tolerance: f64) -> Result<usize> {
    partition.check_covers(g.node_count())?;
    if g.edge_count() == 0 {
        return Ok(0);
    }
    let base = LevelGraph::from_graph(g);
    let mut mover = Mover::new(&base, partition.assignment().to_vec(), tolerance);
    Ok((0..g.node_count())
        .filter(|&v| {
            let (best, delta) = mover.best_move(v);
            best != partition.community_of(v) && delta > tolerance
        })
        .count())
}

pub fn partition_from_assignment(
    node_count: usize,
    assignment: &std::collections::HashMap<usize, usize>,
) -> Result<Partition> {
    Partition::from_assignment(node_count, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::modularity;

    fn two_k5() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for u in 0..5 {
                for v in u + 1..5 {
                    edges.push((base + u, base + v));
                }
            }
        }
        Graph::new(10, edges).unwrap()
    }

    #[test]
    fn splits_disjoint_cliques() {
        let p = louvain(&two_k5(), &LouvainConfig::default()).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert_eq!(modularity::<f64>(&two_k5(), &p).unwrap(), 0.5);
    }

    #[test]
    fn clique_stays_whole() {
        let p = louvain(&Graph::complete(6), &LouvainConfig::with_seed(3)).unwrap();
        assert_eq!(p.community_count(), 1);
    }

    #[test]
    fn edgeless_graph_errors() {
        assert!(matches!(
            louvain(&Graph::empty(4), &LouvainConfig::default()),
            Err(Error::NoEdges(_))
        ));
    }

    #[test]
    fn config_validation() {
        let bad = LouvainConfig {
            max_passes: 0,
            ..LouvainConfig::default()
        };
        assert!(louvain(&Graph::path(3), &bad).is_err());
        let bad = LouvainConfig {
            min_modularity_gain: 0.0,
            ..LouvainConfig::default()
        };
        assert!(louvain(&Graph::path(3), &bad).is_err());
    }

    #[test]
    fn trace_is_monotone_and_ends_at_fixpoint() {
        let g = crate::models::baseline::planted_partition(5, 12, 0.5, 0.05, &mut RngStream::new(2))
            .unwrap()
            .0;
        let out = louvain_with_trace(&g, &LouvainConfig::with_seed(5)).unwrap();
        for pair in out.pass_modularity.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12, "{:?}", out.pass_modularity);
        }
        let q: f64 = modularity(&g, &out.partition).unwrap();
        assert!((q - out.pass_modularity.last().unwrap()).abs() < 1e-12);
        assert_eq!(positive_gain_moves(&g, &out.partition, 1e-7).unwrap(), 0);
    }

    #[test]
    fn singleton_partition_has_positive_moves() {
        assert!(positive_gain_moves(&two_k5(), &Partition::singletons(10), 1e-7).unwrap() > 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = crate::models::baseline::planted_partition(6, 10, 0.4, 0.05, &mut RngStream::new(9))
            .unwrap()
            .0;
        let cfg = LouvainConfig::with_seed(77);
        assert_eq!(louvain(&g, &cfg).unwrap(), louvain(&g, &cfg).unwrap());
    }
}
