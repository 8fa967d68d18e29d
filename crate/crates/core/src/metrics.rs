//! Degree and clustering distributions, density, RMSE comparators and
//! modularity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::num::{pairs, Real};
use crate::partition::Partition;

/// Histogram `d -> n_d`. Only degrees with at least one node are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeDistribution {
    counts: BTreeMap<usize, usize>,
}

impl DegreeDistribution {
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        for d in degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        Self { counts }
    }

    /// `n_d`, zero for unrealized degrees.
    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn node_count(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&d, &n)| (d, n))
    }
}

/// Clustering coefficient per degree, `d -> cc_d`. Degrees without nodes are
/// not stored and read as 0. Serialized as a list of `[degree, cc]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real", into = "Vec<(usize, T)>", try_from = "Vec<(usize, T)>")]
pub struct CcpdDistribution<T> {
    values: BTreeMap<usize, T>,
}

impl<T: Real> From<CcpdDistribution<T>> for Vec<(usize, T)> {
    fn from(ccpd: CcpdDistribution<T>) -> Self {
        ccpd.values.into_iter().collect()
    }
}

impl<T: Real> TryFrom<Vec<(usize, T)>> for CcpdDistribution<T> {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, T)>) -> Result<Self> {
        Self::from_pairs(pairs)
    }
}

impl<T: Real> CcpdDistribution<T> {
    /// Builds from explicit pairs; values must lie in `[0, 1]`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (d, cc) in pairs {
            if !(cc >= T::zero() && cc <= T::one()) {
                return Err(Error::InvalidParameter(format!("cc_{d} = {cc} outside [0, 1]")));
            }
            values.insert(d, cc);
        }
        Ok(Self { values })
    }

    pub fn get(&self, degree: usize) -> T {
        self.values.get(&degree).copied().unwrap_or_else(T::zero)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.values.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.values.iter().map(|(&d, &cc)| (d, cc))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn degree_distribution(g: &Graph) -> DegreeDistribution {
    DegreeDistribution::from_degrees(g.degrees())
}

/// `2 L_v / (d_v (d_v - 1))`, or 0 when `d_v < 2`.
pub fn local_cc<T: Real>(g: &Graph, v: NodeId) -> Result<T> {
    let d = g.degree(v)?;
    Ok(local_cc_unchecked(g, v, d))
}

fn local_cc_unchecked<T: Real>(g: &Graph, v: NodeId, d: usize) -> T {
    if d < 2 {
        return T::zero();
    }
    T::from_count(g.neighbor_links(v)) / pairs::<T>(d)
}

/// Local clustering coefficient of every node.
pub fn local_ccs<T: Real>(g: &Graph) -> Vec<T> {
    (0..g.node_count())
        .map(|v| local_cc_unchecked(g, v, g.deg(v)))
        .collect()
}

/// Mean local CC over all nodes (0 for the empty graph).
pub fn mean_local_cc<T: Real>(g: &Graph) -> T {
    if g.node_count() == 0 {
        return T::zero();
    }
    local_ccs::<T>(g).into_iter().sum::<T>() / T::from_count(g.node_count())
}

/// Average local CC over the nodes of each realized degree.
pub fn ccpd<T: Real>(g: &Graph) -> CcpdDistribution<T> {
    let mut sums: BTreeMap<usize, (T, usize)> = BTreeMap::new();
    for (v, cc) in local_ccs::<T>(g).into_iter().enumerate() {
        let entry = sums.entry(g.deg(v)).or_insert((T::zero(), 0));
        entry.0 = entry.0 + cc;
        entry.1 += 1;
    }
    CcpdDistribution {
        values: sums
            .into_iter()
            .map(|(d, (sum, n))| (d, sum / T::from_count(n)))
            .collect(),
    }
}

/// `|E| / C(n, 2)`; graphs with fewer than two nodes have density 0.
pub fn density<T: Real>(g: &Graph) -> T {
    if g.node_count() < 2 {
        return T::zero();
    }
    T::from_count(g.edge_count()) / pairs::<T>(g.node_count())
}

fn rmse_over<T: Real>(max_degree: Option<usize>, diff: impl Fn(usize) -> T) -> T {
    let Some(max_degree) = max_degree else {
        return T::zero();
    };
    let sum: T = (0..=max_degree)
        .map(|d| {
            let e = diff(d);
            e * e
        })
        .sum();
    (sum / T::from_count(max_degree + 1)).sqrt()
}

/// RMSE of node counts `n_d` over degrees `0..=D`, `D` the larger of the two
/// maximum degrees.
pub fn rmse_degree<T: Real>(reference: &DegreeDistribution, sample: &DegreeDistribution) -> T {
    let max = reference.max_degree().max(sample.max_degree());
    rmse_over(max, |d| {
        T::from_count(reference.count(d)) - T::from_count(sample.count(d))
    })
}

/// RMSE of `cc_d` over degrees `0..=D`; unrealized degrees read as 0.
pub fn rmse_ccpd<T: Real>(reference: &CcpdDistribution<T>, sample: &CcpdDistribution<T>) -> T {
    let max = reference.max_degree().max(sample.max_degree());
    rmse_over(max, |d| reference.get(d) - sample.get(d))
}

/// Newman modularity `Q = sum_i (e_ii - a_i^2)`.
pub fn modularity<T: Real>(g: &Graph, partition: &Partition) -> Result<T> {
    partition.check_covers(g.node_count())?;
    if g.edge_count() == 0 {
        return Err(Error::NoEdges("modularity"));
    }
    let k = partition.community_count();
    let mut internal = vec![0usize; k];
    let mut degree_sum = vec![0usize; k];
    for (u, v) in g.edges() {
        let (cu, cv) = (partition.community_of(u), partition.community_of(v));
        if cu == cv {
            internal[cu] += 1;
        }
        degree_sum[cu] += 1;
        degree_sum[cv] += 1;
    }
    let m = T::from_count(g.edge_count());
    let two_m = m + m;
    let q: T = internal
        .iter()
        .zip(&degree_sum)
        .map(|(&l, &a)| {
            let a = T::from_count(a) / two_m;
            T::from_count(l) / m - a * a
        })
        .sum();
    debug_assert!(q >= T::lit(-0.5 - 1e-9) && q <= T::lit(1.0 + 1e-9), "Q = {q}");
    Ok(q)
}
