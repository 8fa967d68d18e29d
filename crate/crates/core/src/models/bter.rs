//! Block two-level Erdős–Rényi (BTER): degree-based affinity groups wired
//! internally by ER, plus a global Chung–Lu phase on residual degrees.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::baseline::{bernoulli, push_cl_samples, ClWeights};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::metrics::{ccpd, CcpdDistribution};
use crate::num::{pairs, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BterParams<T> {
    pub expected_degrees: Vec<usize>,
    pub ccpd: CcpdDistribution<T>,
}

/// One affinity group `A_L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AffinityGroup<T> {
    pub members: Vec<NodeId>,
    pub er_probability: T,
    /// Expected number of uniform pair draws needed to place
    /// `C(|A_L|, 2) p_L` distinct edges. `None` when `p_L = 1`.
    pub sampling_weight: Option<T>,
}

impl<T: Real> AffinityGroup<T> {
    pub fn new(members: Vec<NodeId>, er_probability: T) -> Self {
        let sampling_weight = (er_probability < T::one())
            .then(|| pairs::<T>(members.len()) * (T::one() / (T::one() - er_probability)).ln());
        Self {
            members,
            er_probability,
            sampling_weight,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Wired completely without sampling.
    pub fn is_complete(&self) -> bool {
        self.er_probability >= T::one()
    }

    /// Expected ER edges, `C(|A_L|, 2) p_L`.
    pub fn expected_edges(&self) -> T {
        pairs::<T>(self.len()) * self.er_probability
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BterGroups<T> {
    pub groups: Vec<AffinityGroup<T>>,
    pub residual_weights: ClWeights<T>,
    /// Group index of each node; `None` for degree-0 nodes.
    pub group_of: Vec<Option<usize>>,
}

impl<T: Real> BterGroups<T> {
    /// Probability that the pair `{i, j}` appears when the ER and CL phases
    /// are combined as independent per-pair trials: `p_L + (1 - p_L) CL` inside
    /// a group, `CL` across groups.
    pub fn pair_probability(&self, i: NodeId, j: NodeId) -> Result<T> {
        let cl = self.residual_weights.probability(i, j)?;
        Ok(match (self.group_of[i], self.group_of[j]) {
            (Some(a), Some(b)) if a == b => {
                let p = self.groups[a].er_probability;
                p + (T::one() - p) * cl
            }
            _ => cl,
        })
    }
}

/// Splits `order` (already sorted ascending by the grouping degree) into
/// consecutive groups. Each group's target size is its first member's degree
/// plus one; only the final group may fall short.
pub(crate) fn greedy_groups(order: &[NodeId], degree: impl Fn(NodeId) -> usize) -> Vec<Vec<NodeId>> {
    let mut groups = Vec::new();
    let mut rest = order;
    while let Some(&first) = rest.first() {
        let size = (degree(first) + 1).min(rest.len());
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    groups
}

/// Reads the degrees and CCPD of `g`.
pub fn bter_fit<T: Real>(g: &Graph) -> BterParams<T> {
    BterParams {
        expected_degrees: g.degrees(),
        ccpd: ccpd(g),
    }
}

/// Affinity groups by ascending expected degree (degree-0 nodes excluded),
/// `p_L = cc_d^(1/3)` for the group's minimum degree `d`, and residual weights
/// `max(0, d_i - p_L (|A_L| - 1))`.
pub fn bter_build_groups<T: Real>(params: &BterParams<T>) -> BterGroups<T> {
    let degrees = &params.expected_degrees;
    let mut order: Vec<NodeId> = (0..degrees.len()).filter(|&v| degrees[v] > 0).collect();
    order.sort_by_key(|&v| (degrees[v], v));

    let mut group_of = vec![None; degrees.len()];
    let mut residual = vec![T::zero(); degrees.len()];
    let groups: Vec<AffinityGroup<T>> = greedy_groups(&order, |v| degrees[v])
        .into_iter()
        .enumerate()
        .map(|(index, members)| {
            let p = params.ccpd.get(degrees[members[0]]).cbrt();
            let inside = T::from_count(members.len() - 1);
            for &v in &members {
                group_of[v] = Some(index);
                residual[v] = (T::from_count(degrees[v]) - p * inside).max(T::zero());
            }
            AffinityGroup::new(members, p)
        })
        .collect();

    BterGroups {
        groups,
        residual_weights: ClWeights::new(residual).expect("residuals are clamped at zero"),
        group_of,
    }
}

/// ER inside every group, then `round(sum w / 2)` endpoint draws on the
/// residual weights. Duplicates across phases collapse.
pub fn bter_generate_from_groups<T: Real, R: Rng + ?Sized>(groups: &BterGroups<T>, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for group in &groups.groups {
        let p = group.er_probability;
        if p <= T::zero() {
            continue;
        }
        let m = &group.members;
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                if p >= T::one() || bernoulli(p, rng) {
                    edges.push((m[a], m[b]));
                }
            }
        }
    }
    push_cl_samples(&groups.residual_weights, rng, &mut edges);
    Graph::new(groups.group_of.len(), edges).expect("generated pairs are valid")
}

pub fn bter_generate<T: Real, R: Rng + ?Sized>(params: &BterParams<T>, rng: &mut R) -> Graph {
    bter_generate_from_groups(&bter_build_groups(params), rng)
}

impl<T: Real> BterParams<T> {
    pub fn validate(&self) -> Result<()> {
        if let Some((d, cc)) = self.ccpd.iter().find(|(_, cc)| !(*cc >= T::zero() && *cc <= T::one())) {
            return Err(Error::InvalidParameter(format!("cc_{d} = {cc}")));
        }
        Ok(())
    }
}
