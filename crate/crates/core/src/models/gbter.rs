//! Generalized BTER: user-specified communities with an ER probability per
//! community and a global Chung–Lu term on excess degrees, generated by one
//! Bernoulli trial per node pair.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::baseline::{bernoulli, ClWeights};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::metrics::{density, mean_local_cc};
use crate::num::Real;
use crate::partition::Partition;

/// How the per-community ER probability is learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// `p_k` = density of `G[C_k]`.
    Density,
    /// `p_k` = (mean local CC of `G[C_k]`)^(1/3).
    Cc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "GbterRepr<T>", into = "GbterRepr<T>")]
pub struct GbterParams<T> {
    expected_degrees: Vec<usize>,
    partition: Partition,
    community_p: Vec<T>,
    fit_mode: FitMode,
    excess: ClWeights<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct GbterRepr<T> {
    expected_degrees: Vec<usize>,
    partition: Partition,
    community_p: Vec<T>,
    fit_mode: FitMode,
}

impl<T: Real> TryFrom<GbterRepr<T>> for GbterParams<T> {
    type Error = Error;
    fn try_from(r: GbterRepr<T>) -> Result<Self> {
        Self::new(r.expected_degrees, r.partition, r.community_p, r.fit_mode)
    }
}

impl<T: Real> From<GbterParams<T>> for GbterRepr<T> {
    fn from(p: GbterParams<T>) -> Self {
        GbterRepr {
            expected_degrees: p.expected_degrees,
            partition: p.partition,
            community_p: p.community_p,
            fit_mode: p.fit_mode,
        }
    }
}

/// `max(0, d_i - p_k (|C_k| - 1))` for every node.
fn excess_degrees<T: Real>(degrees: &[usize], partition: &Partition, community_p: &[T]) -> Vec<T> {
    let sizes: Vec<usize> = partition.communities().iter().map(Vec::len).collect();
    degrees
        .iter()
        .enumerate()
        .map(|(v, &d)| {
            let k = partition.community_of(v);
            (T::from_count(d) - community_p[k] * T::from_count(sizes[k] - 1)).max(T::zero())
        })
        .collect()
}

impl<T: Real> GbterParams<T> {
    pub fn new(
        expected_degrees: Vec<usize>,
        partition: Partition,
        community_p: Vec<T>,
        fit_mode: FitMode,
    ) -> Result<Self> {
        partition.check_covers(expected_degrees.len())?;
        if community_p.len() != partition.community_count() {
            return Err(Error::InconsistentParams(format!(
                "{} community probabilities for {} communities",
                community_p.len(),
                partition.community_count()
            )));
        }
        if let Some(p) = community_p.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
            return Err(Error::InvalidParameter(format!("community probability {p}")));
        }
        let excess = ClWeights::new(excess_degrees(&expected_degrees, &partition, &community_p))?;
        Ok(Self {
            expected_degrees,
            partition,
            community_p,
            fit_mode,
            excess,
        })
    }

    pub fn expected_degrees(&self) -> &[usize] {
        &self.expected_degrees
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn community_p(&self) -> &[T] {
        &self.community_p
    }

    pub fn fit_mode(&self) -> FitMode {
        self.fit_mode
    }

    /// Cached excess degrees `ε_i`.
    pub fn excess(&self) -> &ClWeights<T> {
        &self.excess
    }

    pub fn node_count(&self) -> usize {
        self.expected_degrees.len()
    }

    /// Whether the cached `ε` matches a recomputation from the other fields.
    pub fn excess_is_coherent(&self) -> bool {
        excess_degrees(&self.expected_degrees, &self.partition, &self.community_p) == self.excess.weights()
    }

    #[inline]
    fn probability_unchecked(&self, i: NodeId, j: NodeId) -> T {
        let cl = self.excess.probability_unchecked(i, j);
        let k = self.partition.community_of(i);
        if k == self.partition.community_of(j) {
            let p = self.community_p[k];
            p + (T::one() - p) * cl
        } else {
            cl
        }
    }

    /// `Σ_{i<j} P(ij)`.
    pub fn expected_edge_count(&self) -> T {
        let n = self.node_count();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.probability_unchecked(i, j))
            .sum()
    }
}

/// Degrees from `g`; `p_k` from each induced community subgraph.
pub fn gbter_fit<T: Real>(g: &Graph, partition: &Partition, mode: FitMode) -> Result<GbterParams<T>> {
    partition.check_covers(g.node_count())?;
    let community_p = partition
        .communities()
        .iter()
        .map(|members| {
            let (sub, _) = g.induced_subgraph(members)?;
            Ok(match mode {
                FitMode::Density => density(&sub),
                FitMode::Cc => mean_local_cc::<T>(&sub).cbrt(),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    GbterParams::new(g.degrees(), partition.clone(), community_p, mode)
}

/// `p_k + (1 - p_k) CL(ε_i, ε_j)` inside a community, `CL(ε_i, ε_j)` across.
pub fn gbter_edge_probability<T: Real>(params: &GbterParams<T>, i: NodeId, j: NodeId) -> Result<T> {
    params.excess.probability(i, j)?;
    Ok(params.probability_unchecked(i, j))
}

/// One Bernoulli trial per node pair.
pub fn gbter_generate<T: Real, R: Rng + ?Sized>(params: &GbterParams<T>, rng: &mut R) -> Graph {
    let n = params.node_count();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = params.probability_unchecked(i, j);
            if p >= T::one() || (p > T::zero() && bernoulli(p, rng)) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("generated pairs are valid")
}
