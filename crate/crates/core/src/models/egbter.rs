//! Enhanced GBTER: BTER run inside each community (groupings by global
//! degree, ER per grouping, Chung–Lu on within-community excess degree) plus
//! a global Chung–Lu process on between-community excess degree.
//!
//! Generation draws a fixed budget of edge samples. Each sample first picks
//! its process (grouping ER, within-community CL, global CL) with probability
//! proportional to the process's expected edge count, then draws endpoints
//! under that process.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bter::{greedy_groups, AffinityGroup};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::metrics::{ccpd, CcpdDistribution};
use crate::num::{round_half_up, Real};
use crate::partition::Partition;
use crate::sampling::{uniform_pair, AliasTable, EndpointSampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EgbterParams<T> {
    pub partition: Partition,
    /// `d_i`: degree inside the node's own community.
    pub within_degree: Vec<usize>,
    /// `D_i`: degree in the whole graph.
    pub global_degree: Vec<usize>,
    /// CCPD of each induced community subgraph, indexed by community.
    pub within_ccpd: Vec<CcpdDistribution<T>>,
}

impl<T: Real> EgbterParams<T> {
    pub fn node_count(&self) -> usize {
        self.global_degree.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        self.partition.check_covers(n)?;
        if self.within_degree.len() != n {
            return Err(Error::InconsistentParams(format!(
                "{} within-community degrees for {n} nodes",
                self.within_degree.len()
            )));
        }
        if self.within_ccpd.len() != self.partition.community_count() {
            return Err(Error::InconsistentParams(format!(
                "{} CCPD tables for {} communities",
                self.within_ccpd.len(),
                self.partition.community_count()
            )));
        }
        if let Some(v) = (0..n).find(|&v| self.within_degree[v] > self.global_degree[v]) {
            return Err(Error::InconsistentParams(format!(
                "node {v}: within-community degree {} exceeds global degree {}",
                self.within_degree[v], self.global_degree[v]
            )));
        }
        for table in &self.within_ccpd {
            if let Some((d, cc)) = table.iter().find(|(_, cc)| !(*cc >= T::zero() && *cc <= T::one())) {
                return Err(Error::InvalidParameter(format!("cc_{d} = {cc}")));
            }
        }
        Ok(())
    }
}

/// Expected edge counts per process and the resulting sample budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProcessWeights<T> {
    /// `Σ w(A_L)` over groupings with `p_L < 1`.
    pub er: T,
    /// `Σ ε_i / 2`.
    pub within_cl: T,
    /// `Σ E_i / 2`.
    pub global_cl: T,
    /// `Σ ε_i`, reported for inspection.
    pub within_excess_sum: T,
    /// `Σ E_i`, reported for inspection.
    pub global_excess_sum: T,
    pub budget: SampleBudget,
}

/// Each part rounded half up independently; `total` is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub er: usize,
    pub within_cl: usize,
    pub global_cl: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CommunityPlan<T> {
    pub members: Vec<NodeId>,
    pub groupings: Vec<AffinityGroup<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EgbterPlan<T> {
    pub node_count: usize,
    pub communities: Vec<CommunityPlan<T>>,
    /// `ε_i`, within-community excess degree.
    pub within_excess: Vec<T>,
    /// `E_i = D_i - d_i`, between-community excess degree.
    pub global_excess: Vec<T>,
    pub weights: ProcessWeights<T>,
}

impl<T: Real> EgbterPlan<T> {
    /// Assembles a plan from its parts and derives the process weights.
    pub fn new(
        node_count: usize,
        communities: Vec<CommunityPlan<T>>,
        within_excess: Vec<T>,
        global_excess: Vec<T>,
    ) -> Result<Self> {
        if within_excess.len() != node_count || global_excess.len() != node_count {
            return Err(Error::InconsistentParams("excess vectors must cover every node".into()));
        }
        let in_range = |v: &NodeId| *v < node_count;
        if !communities
            .iter()
            .all(|c| c.members.iter().all(in_range) && c.groupings.iter().all(|g| g.members.iter().all(in_range)))
        {
            return Err(Error::InconsistentParams("plan member out of range".into()));
        }
        if within_excess
            .iter()
            .chain(&global_excess)
            .any(|x| !x.is_finite() || *x < T::zero())
        {
            return Err(Error::InvalidParameter(
                "excess degrees must be finite and non-negative".into(),
            ));
        }
        let er: T = communities
            .iter()
            .flat_map(|c| &c.groupings)
            .filter_map(|g| g.sampling_weight)
            .sum();
        let within_excess_sum: T = within_excess.iter().copied().sum();
        let global_excess_sum: T = global_excess.iter().copied().sum();
        let half = T::lit(2.0);
        let (within_cl, global_cl) = (within_excess_sum / half, global_excess_sum / half);
        let budget = {
            let (e, w, g) = (round_half_up(er), round_half_up(within_cl), round_half_up(global_cl));
            SampleBudget {
                er: e,
                within_cl: w,
                global_cl: g,
                total: e + w + g,
            }
        };
        Ok(Self {
            node_count,
            communities,
            within_excess,
            global_excess,
            weights: ProcessWeights {
                er,
                within_cl,
                global_cl,
                within_excess_sum,
                global_excess_sum,
                budget,
            },
        })
    }
}

/// Global degrees from `g`; within-community degrees and CCPD from each
/// induced community subgraph.
pub fn egbter_fit<T: Real>(g: &Graph, partition: &Partition) -> Result<EgbterParams<T>> {
    partition.check_covers(g.node_count())?;
    let mut within_degree = vec![0; g.node_count()];
    let mut within_ccpd = Vec::with_capacity(partition.community_count());
    for members in partition.communities() {
        let (sub, remap) = g.induced_subgraph(&members)?;
        for (local, &v) in remap.iter().enumerate() {
            within_degree[v] = sub.deg(local);
        }
        within_ccpd.push(ccpd(&sub));
    }
    Ok(EgbterParams {
        partition: partition.clone(),
        within_degree,
        global_degree: g.degrees(),
        within_ccpd,
    })
}

/// Within each community: group nodes ascending by global degree (groups of
/// size `D + 1`), store `p_L = cc_{d*}^(1/3)` for the grouping's minimum
/// within-community degree `d*`, and derive `ε_i` and `E_i`.
pub fn egbter_build_plan<T: Real>(params: &EgbterParams<T>) -> Result<EgbterPlan<T>> {
    params.validate()?;
    let n = params.node_count();
    let (d, big_d) = (&params.within_degree, &params.global_degree);
    let mut within_excess = vec![T::zero(); n];
    let global_excess: Vec<T> = (0..n).map(|v| T::from_count(big_d[v] - d[v])).collect();

    let communities = params
        .partition
        .communities()
        .into_iter()
        .enumerate()
        .map(|(k, members)| {
            let mut order: Vec<NodeId> = members.iter().copied().filter(|&v| big_d[v] > 0).collect();
            order.sort_by_key(|&v| (big_d[v], v));
            let groupings = greedy_groups(&order, |v| big_d[v])
                .into_iter()
                .map(|grouping| {
                    let min_within = grouping.iter().map(|&v| d[v]).min().unwrap_or(0);
                    let p = params.within_ccpd[k].get(min_within).cbrt();
                    let inside = T::from_count(grouping.len() - 1);
                    for &v in &grouping {
                        within_excess[v] = (T::from_count(d[v]) - p * inside).max(T::zero());
                    }
                    AffinityGroup::new(grouping, p)
                })
                .collect();
            CommunityPlan { members, groupings }
        })
        .collect();

    EgbterPlan::new(n, communities, within_excess, global_excess)
}

/// Prepared samplers for one plan; reusable across replicates.
#[derive(Debug, Clone)]
pub struct EgbterSampler<T> {
    node_count: usize,
    complete: Vec<Vec<NodeId>>,
    er_groups: Vec<Vec<NodeId>>,
    er_table: Option<AliasTable>,
    within: Vec<EndpointSampler>,
    within_table: Option<AliasTable>,
    global: Option<EndpointSampler>,
    process: Option<AliasTable>,
    budget: usize,
    _scalar: std::marker::PhantomData<T>,
}

#[derive(Clone, Copy)]
enum Process {
    Er,
    WithinCl,
    GlobalCl,
}

const PROCESSES: [Process; 3] = [Process::Er, Process::WithinCl, Process::GlobalCl];

impl<T: Real> EgbterSampler<T> {
    pub fn new(plan: &EgbterPlan<T>) -> Result<Self> {
        let mut complete = Vec::new();
        let mut er_groups = Vec::new();
        let mut er_weights = Vec::new();
        for grouping in plan.communities.iter().flat_map(|c| &c.groupings) {
            if grouping.len() < 2 {
                continue;
            }
            match grouping.sampling_weight {
                None => complete.push(grouping.members.clone()),
                Some(w) if w > T::zero() => {
                    er_groups.push(grouping.members.clone());
                    er_weights.push(w);
                }
                Some(_) => {}
            }
        }

        let mut within = Vec::new();
        let mut within_weights = Vec::new();
        for community in &plan.communities {
            let eps: Vec<T> = community.members.iter().map(|&v| plan.within_excess[v]).collect();
            if eps.iter().filter(|x| **x > T::zero()).count() < 2 {
                continue;
            }
            let sampler = EndpointSampler::over(community.members.clone(), &eps)?;
            within_weights.push(sampler.total());
            within.push(sampler);
        }

        let global = EndpointSampler::new(&plan.global_excess)
            .ok()
            .filter(|s| s.support() >= 2);

        let w = &plan.weights;
        Ok(Self {
            node_count: plan.node_count,
            complete,
            er_groups,
            er_table: AliasTable::new(&er_weights)?,
            within,
            within_table: AliasTable::new(&within_weights)?,
            global,
            process: AliasTable::new(&[w.er, w.within_cl, w.global_cl])?,
            budget: w.budget.total,
            _scalar: std::marker::PhantomData,
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn draw<R: Rng + ?Sized>(&self, process: Process, rng: &mut R) -> Option<(NodeId, NodeId)> {
        match process {
            Process::Er => {
                let table = self.er_table.as_ref()?;
                Some(uniform_pair(&self.er_groups[table.sample(rng)], rng))
            }
            Process::WithinCl => {
                let table = self.within_table.as_ref()?;
                self.within[table.sample(rng)].draw(rng).ok()
            }
            Process::GlobalCl => self.global.as_ref()?.draw(rng).ok(),
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        let mut edges = Vec::new();
        for members in &self.complete {
            for (a, &u) in members.iter().enumerate() {
                edges.extend(members[a + 1..].iter().map(|&v| (u, v)));
            }
        }
        if let Some(process) = &self.process {
            for _ in 0..self.budget {
                if let Some(pair) = self.draw(PROCESSES[process.sample(rng)], rng) {
                    edges.push(pair);
                }
            }
        }
        Graph::new(self.node_count, edges).expect("sampled pairs are valid")
    }
}

pub fn egbter_generate<T: Real, R: Rng + ?Sized>(params: &EgbterParams<T>, rng: &mut R) -> Result<Graph> {
    let plan = egbter_build_plan(params)?;
    Ok(EgbterSampler::new(&plan)?.generate(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::bter::{bter_build_groups, bter_fit};
    use crate::sampling::RngStream;

    fn two_k4() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    edges.push((base + u, base + v));
                }
            }
        }
        Graph::new(8, edges).unwrap()
    }

    fn halves() -> Partition {
        Partition::from_labels(&[0, 0, 0, 0, 1, 1, 1, 1])
    }

    #[test]
    fn fit_two_k4() {
        let p = egbter_fit::<f64>(&two_k4(), &halves()).unwrap();
        assert_eq!(p.within_degree, vec![3; 8]);
        assert_eq!(p.global_degree, vec![3; 8]);
        for table in &p.within_ccpd {
            assert_eq!(table.iter().collect::<Vec<_>>(), vec![(3, 1.0)]);
        }
    }

    #[test]
    fn bridge_only_adds_global_degree() {
        let mut edges: Vec<_> = two_k4().edges().collect();
        edges.push((0, 4));
        let g = Graph::new(8, edges).unwrap();
        let p = egbter_fit::<f64>(&g, &halves()).unwrap();
        assert_eq!((p.global_degree[0], p.within_degree[0]), (4, 3));
        let plan = egbter_build_plan(&p).unwrap();
        assert_eq!(plan.global_excess[0], 1.0);
    }

    #[test]
    fn fit_path_with_split() {
        let p = egbter_fit::<f64>(&Graph::path(3), &Partition::from_labels(&[0, 0, 1])).unwrap();
        assert_eq!(p.within_degree, vec![1, 1, 0]);
        assert_eq!(p.global_degree, vec![1, 2, 1]);
        let plan = egbter_build_plan(&p).unwrap();
        assert_eq!(plan.global_excess, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn k4_plan_is_complete_grouping() {
        let p = egbter_fit::<f64>(&Graph::complete(4), &Partition::single(4)).unwrap();
        let plan = egbter_build_plan(&p).unwrap();
        assert_eq!(plan.communities[0].groupings.len(), 1);
        let grouping = &plan.communities[0].groupings[0];
        assert_eq!((grouping.len(), grouping.er_probability), (4, 1.0));
        assert_eq!(plan.within_excess, vec![0.0; 4]);
        assert_eq!(plan.global_excess, vec![0.0; 4]);
        assert_eq!(
            (plan.weights.er, plan.weights.within_cl, plan.weights.global_cl),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(plan.weights.budget.total, 0);
    }

    #[test]
    fn three_node_community_weights() {
        let p = EgbterParams {
            partition: Partition::single(3),
            within_degree: vec![2; 3],
            global_degree: vec![2; 3],
            within_ccpd: vec![CcpdDistribution::from_pairs([(2, 0.125f64)]).unwrap()],
        };
        let plan = egbter_build_plan(&p).unwrap();
        let grouping = &plan.communities[0].groupings[0];
        assert_eq!(grouping.len(), 3);
        assert!((grouping.er_probability - 0.5).abs() < 1e-15);
        for eps in &plan.within_excess {
            assert!((eps - 1.0).abs() < 1e-15);
        }
        let w = grouping.sampling_weight.unwrap();
        assert!((w - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((plan.weights.within_cl - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_cc_community_is_pure_cl() {
        let g = Graph::path(5);
        let p = egbter_fit::<f64>(&g, &Partition::single(5)).unwrap();
        let plan = egbter_build_plan(&p).unwrap();
        assert_eq!(plan.weights.er, 0.0);
        let eps: Vec<f64> = p.within_degree.iter().map(|&d| d as f64).collect();
        assert_eq!(plan.within_excess, eps);
    }

    #[test]
    fn inconsistent_degrees_rejected() {
        let p = EgbterParams::<f64> {
            partition: Partition::single(2),
            within_degree: vec![2, 1],
            global_degree: vec![1, 1],
            within_ccpd: vec![CcpdDistribution::default()],
        };
        assert!(matches!(egbter_build_plan(&p), Err(Error::InconsistentParams(_))));
    }

    #[test]
    fn two_k4_regenerates_exactly() {
        let p = egbter_fit::<f64>(&two_k4(), &halves()).unwrap();
        let g = egbter_generate(&p, &mut RngStream::new(4)).unwrap();
        assert_eq!(g, two_k4());
    }

    #[test]
    fn single_community_plan_matches_bter() {
        let g = Graph::new(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 3), (5, 6)]).unwrap();
        let egbter = egbter_build_plan(&egbter_fit::<f64>(&g, &Partition::single(7)).unwrap()).unwrap();
        let bter = bter_build_groups(&bter_fit::<f64>(&g));
        assert_eq!(egbter.communities[0].groupings, bter.groups);
        assert_eq!(egbter.within_excess, bter.residual_weights.weights());
        assert!(egbter.global_excess.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let (g, part) = crate::models::baseline::planted_partition(4, 10, 0.4, 0.05, &mut RngStream::new(1)).unwrap();
        let p = egbter_fit::<f64>(&g, &part).unwrap();
        let a = egbter_generate(&p, &mut RngStream::new(8)).unwrap();
        let b = egbter_generate(&p, &mut RngStream::new(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn plan_serializes() {
        let p = egbter_fit::<f64>(&Graph::path(4), &Partition::from_labels(&[0, 0, 1, 1])).unwrap();
        let plan = egbter_build_plan(&p).unwrap();
        let text = serde_json::to_string(&plan).unwrap();
        assert!(text.contains("\"within_excess_sum\""));
        assert_eq!(serde_json::from_str::<EgbterPlan<f64>>(&text).unwrap(), plan);
    }
}
