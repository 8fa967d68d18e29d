//! Erdős–Rényi and Chung–Lu generators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::num::{round_half_up, Real};
use crate::partition::Partition;
use crate::sampling::EndpointSampler;

/// Chung–Lu node weights with their cached total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "Vec<T>", into = "Vec<T>")]
pub struct ClWeights<T> {
    weights: Vec<T>,
    total: T,
}

impl<T: Real> TryFrom<Vec<T>> for ClWeights<T> {
    type Error = Error;
    fn try_from(weights: Vec<T>) -> Result<Self> {
        Self::new(weights)
    }
}

impl<T: Real> From<ClWeights<T>> for Vec<T> {
    fn from(w: ClWeights<T>) -> Self {
        w.weights
    }
}

impl<T: Real> ClWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidParameter(format!("CL weight {w}")));
        }
        let total = weights.iter().copied().sum();
        Ok(Self { weights, total })
    }

    /// The null model: `w_i = d_i`.
    pub fn from_degrees(degrees: &[usize]) -> Self {
        let weights = degrees.iter().map(|&d| T::from_count(d)).collect();
        Self::new(weights).expect("degrees are non-negative")
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total(&self) -> T {
        self.total
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `min(1, w_i w_j / sum_k w_k)`; 0 when the total is 0.
    pub fn probability(&self, i: NodeId, j: NodeId) -> Result<T> {
        for node in [i, j] {
            if node >= self.len() {
                return Err(Error::NodeOutOfRange {
                    node,
                    node_count: self.len(),
                });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(self.probability_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn probability_unchecked(&self, i: NodeId, j: NodeId) -> T {
        if self.total <= T::zero() {
            return T::zero();
        }
        (self.weights[i] * self.weights[j] / self.total).min(T::one())
    }

    /// Expected degree of `i` under exact per-pair insertion.
    pub fn expected_degree(&self, i: NodeId) -> T {
        (0..self.len())
            .filter(|&j| j != i)
            .map(|j| self.probability_unchecked(i, j))
            .sum()
    }
}

pub fn cl_probability<T: Real>(w: &ClWeights<T>, i: NodeId, j: NodeId) -> Result<T> {
    w.probability(i, j)
}

#[inline]
pub(crate) fn bernoulli<T: Real, R: Rng + ?Sized>(p: T, rng: &mut R) -> bool {
    rng.gen::<f64>() < p.as_f64()
}

/// `ER(n, p)`: every pair independently with probability `p`.
pub fn er_generate<T: Real, R: Rng + ?Sized>(n: usize, p: T, rng: &mut R) -> Result<Graph> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter(format!("ER probability {p}")));
    }
    if p == T::zero() {
        return Ok(Graph::empty(n));
    }
    if p == T::one() {
        return Ok(Graph::complete(n));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if bernoulli(p, rng) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Chung–Lu with an independent Bernoulli trial per pair.
pub fn cl_generate_exact<T: Real, R: Rng + ?Sized>(w: &ClWeights<T>, rng: &mut R) -> Graph {
    let n = w.len();
    let mut edges = Vec::new();
    if w.total() > T::zero() {
        for u in 0..n {
            if w.weights[u] == T::zero() {
                continue;
            }
            for v in u + 1..n {
                let p = w.probability_unchecked(u, v);
                if p > T::zero() && bernoulli(p, rng) {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::new(n, edges).expect("generated pairs are valid")
}

/// One endpoint pair drawn proportionally to the weights, resampled until
/// distinct.
pub fn cl_sample_endpoints<T: Real, R: Rng + ?Sized>(w: &ClWeights<T>, rng: &mut R) -> Result<(NodeId, NodeId)> {
    EndpointSampler::new(w.weights())?.draw(rng)
}

/// Chung–Lu by endpoint sampling: `round(sum w / 2)` pair draws, duplicates
/// discarded. Weights with fewer than two positive entries give no edges.
pub fn cl_generate_sampled<T: Real, R: Rng + ?Sized>(w: &ClWeights<T>, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    push_cl_samples(w, rng, &mut edges);
    Graph::new(w.len(), edges).expect("sampled pairs are valid")
}

pub(crate) fn push_cl_samples<T: Real, R: Rng + ?Sized>(
    w: &ClWeights<T>,
    rng: &mut R,
    edges: &mut Vec<(NodeId, NodeId)>,
) {
    let draws = round_half_up(w.total() / T::lit(2.0));
    if draws == 0 {
        return;
    }
    let Ok(sampler) = EndpointSampler::new(w.weights()) else {
        return;
    };
    if sampler.support() < 2 {
        return;
    }
    for _ in 0..draws {
        if let Ok(pair) = sampler.draw(rng) {
            edges.push(pair);
        }
    }
}

/// Planted-partition graph: `blocks` equal blocks of `block_size` nodes,
/// within-block pairs with probability `p_in`, cross-block pairs with
/// `p_out`. Returns the planted partition alongside the graph.
pub fn planted_partition<T: Real, R: Rng + ?Sized>(
    blocks: usize,
    block_size: usize,
    p_in: T,
    p_out: T,
    rng: &mut R,
) -> Result<(Graph, Partition)> {
    for p in [p_in, p_out] {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::InvalidParameter(format!("block probability {p}")));
        }
    }
    let n = blocks * block_size;
    let labels: Vec<usize> = (0..n).map(|v| v / block_size.max(1)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if bernoulli(p, rng) {
                edges.push((u, v));
            }
        }
    }
    Ok((Graph::new(n, edges)?, Partition::from_labels(&labels)))
}
