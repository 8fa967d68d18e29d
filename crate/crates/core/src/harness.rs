//! Replicate sweeps: fit every model once to a seed graph, generate
//! replicates with derived seeds, score each against the seed, and
//! macro-average.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{louvain, LouvainConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{
    ccpd, degree_distribution, density, modularity, rmse_ccpd, rmse_degree, CcpdDistribution, DegreeDistribution,
};
use crate::models::baseline::{cl_generate_exact, er_generate, ClWeights};
use crate::models::bter::{bter_build_groups, bter_fit, bter_generate_from_groups, BterGroups};
use crate::models::egbter::{egbter_build_plan, egbter_fit, EgbterSampler};
use crate::models::gbter::{gbter_fit, gbter_generate, FitMode, GbterParams};
use crate::num::Real;
use crate::partition::Partition;
use crate::sampling::{derive_seed, tag, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Er,
    Cl,
    Bter,
    Gbter,
    GbterCc,
    Egbter,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Er,
        ModelKind::Cl,
        ModelKind::Bter,
        ModelKind::Gbter,
        ModelKind::GbterCc,
        ModelKind::Egbter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Er => "er",
            ModelKind::Cl => "cl",
            ModelKind::Bter => "bter",
            ModelKind::Gbter => "gbter",
            ModelKind::GbterCc => "gbter-cc",
            ModelKind::Egbter => "egbter",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn uses_communities(self) -> bool {
        matches!(self, ModelKind::Gbter | ModelKind::GbterCc | ModelKind::Egbter)
    }
}

/// A model fitted to a seed graph, ready to generate replicates.
#[derive(Debug, Clone)]
pub enum FittedModel {
    Er { node_count: usize, p: f64 },
    Cl(ClWeights<f64>),
    Bter(BterGroups<f64>),
    Gbter(GbterParams<f64>),
    Egbter(Box<EgbterSampler<f64>>),
}

impl FittedModel {
    /// Fits `kind` to `seed`; community models use `partition`.
    pub fn fit(kind: ModelKind, seed: &Graph, partition: &Partition) -> Result<Self> {
        Ok(match kind {
            ModelKind::Er => FittedModel::Er {
                node_count: seed.node_count(),
                p: density(seed),
            },
            ModelKind::Cl => FittedModel::Cl(ClWeights::from_degrees(&seed.degrees())),
            ModelKind::Bter => FittedModel::Bter(bter_build_groups(&bter_fit(seed))),
            ModelKind::Gbter => FittedModel::Gbter(gbter_fit(seed, partition, FitMode::Density)?),
            ModelKind::GbterCc => FittedModel::Gbter(gbter_fit(seed, partition, FitMode::Cc)?),
            ModelKind::Egbter => FittedModel::Egbter(Box::new(EgbterSampler::new(&egbter_build_plan(&egbter_fit(
                seed, partition,
            )?)?)?)),
        })
    }

    pub fn generate(&self, rng: &mut RngStream) -> Result<Graph> {
        Ok(match self {
            FittedModel::Er { node_count, p } => er_generate(*node_count, *p, rng)?,
            FittedModel::Cl(w) => cl_generate_exact(w, rng),
            FittedModel::Bter(groups) => bter_generate_from_groups(groups, rng),
            FittedModel::Gbter(params) => gbter_generate(params, rng),
            FittedModel::Egbter(sampler) => sampler.generate(rng),
        })
    }
}

/// Arithmetic mean and sample standard deviation (`n - 1` denominator, 0
/// for a single value). Values are sorted first so the result does not
/// depend on input order.
pub fn macro_average<T: Real>(values: &[T]) -> Result<(T, T)> {
    if values.is_empty() {
        return Err(Error::Empty("macro_average values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = T::from_count(sorted.len());
    let mean = sorted.iter().copied().sum::<T>() / n;
    if sorted.len() == 1 {
        return Ok((mean, T::zero()));
    }
    let ss: T = sorted.iter().map(|&x| (x - mean) * (x - mean)).sum();
    Ok((mean, (ss / (n - T::one())).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub n: usize,
}

impl Summary {
    fn of(values: &[f64]) -> Option<Self> {
        macro_average(values).ok().map(|(mean, std_dev)| Summary {
            mean,
            std_dev,
            n: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub seed_name: String,
    pub models: Vec<ModelKind>,
    pub replicate_count: usize,
    pub master_seed: u64,
    /// Louvain settings; the RNG seed inside is replaced by derived seeds.
    pub louvain: LouvainConfig,
}

impl ExperimentSpec {
    pub fn new(seed_name: impl Into<String>, models: Vec<ModelKind>, replicate_count: usize, master_seed: u64) -> Self {
        Self {
            seed_name: seed_name.into(),
            models,
            replicate_count,
            master_seed,
            louvain: LouvainConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicate_count == 0 {
            return Err(Error::InvalidParameter("replicate_count must be at least 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("model list is empty".into()));
        }
        self.louvain.validate()
    }

    fn louvain_with(&self, seed: u64) -> LouvainConfig {
        LouvainConfig {
            rng_seed: seed,
            ..self.louvain
        }
    }

    /// Seed of the Louvain run that partitions the seed graph.
    pub fn seed_partition_seed(&self) -> u64 {
        derive_seed(self.master_seed, &[tag("seed-partition")])
    }

    pub fn replicate_seed(&self, model: ModelKind, replicate: usize) -> u64 {
        derive_seed(self.master_seed, &[tag(model.name()), replicate as u64])
    }

    pub fn replicate_louvain_seed(&self, model: ModelKind, replicate: usize) -> u64 {
        derive_seed(self.master_seed, &[tag(model.name()), replicate as u64, tag("louvain")])
    }
}

/// Metrics of one generated replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateMetrics {
    pub replicate: usize,
    pub seed: u64,
    pub edge_count: usize,
    pub rmse_degree: f64,
    pub rmse_ccpd: f64,
    /// `None` when the replicate has no edges.
    pub modularity: Option<f64>,
}

/// Reference distributions of the seed graph.
#[derive(Debug, Clone)]
pub struct SeedReference {
    pub degrees: DegreeDistribution,
    pub ccpd: CcpdDistribution<f64>,
}

impl SeedReference {
    pub fn of(g: &Graph) -> Self {
        Self {
            degrees: degree_distribution(g),
            ccpd: ccpd(g),
        }
    }
}

/// Generates and scores replicate `r` of `model`. Depends only on its own
/// derived seeds, never on other replicates.
pub fn run_replicate(
    spec: &ExperimentSpec,
    kind: ModelKind,
    fitted: &FittedModel,
    reference: &SeedReference,
    replicate: usize,
) -> Result<ReplicateMetrics> {
    let seed = spec.replicate_seed(kind, replicate);
    let g = fitted.generate(&mut RngStream::new(seed))?;
    let modularity = if g.edge_count() > 0 {
        let cfg = spec.louvain_with(spec.replicate_louvain_seed(kind, replicate));
        Some(modularity(&g, &louvain(&g, &cfg)?)?)
    } else {
        None
    };
    Ok(ReplicateMetrics {
        replicate,
        seed,
        edge_count: g.edge_count(),
        rmse_degree: rmse_degree(&reference.degrees, &degree_distribution(&g)),
        rmse_ccpd: rmse_ccpd(&reference.ccpd, &ccpd(&g)),
        modularity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub model: ModelKind,
    /// Set when fitting or generation failed; the row then has no metrics.
    pub error: Option<String>,
    pub replicate_count: usize,
    pub rmse_degree: Option<Summary>,
    pub modularity: Option<Summary>,
    /// `|Q - Q_true|` per replicate.
    pub modularity_abs_error: Option<Summary>,
    pub rmse_ccpd: Option<Summary>,
    pub edge_count: Option<Summary>,
    pub replicates: Vec<ReplicateMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub communities: usize,
    pub louvain_seed: u64,
    /// Modularity of the seed under its Louvain partition (the "true" row).
    pub modularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: SeedSummary,
    pub master_seed: u64,
    pub replicate_count: usize,
    pub louvain: LouvainConfig,
    pub rows: Vec<ModelRow>,
    pub has_failures: bool,
}

impl ComparisonReport {
    pub fn row(&self, model: ModelKind) -> Option<&ModelRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    /// Aligned text table with the seed's "true" modularity row first.
    pub fn to_table(&self) -> String {
        let cell = |s: &Option<Summary>| match s {
            Some(s) => format!("{:.4} ± {:.4}", s.mean, s.std_dev),
            None => "NA".to_owned(),
        };
        let mut out = format!(
            "seed: {} (n = {}, m = {}, {} communities), replicates = {}, master seed = {}\n",
            self.seed.name,
            self.seed.node_count,
            self.seed.edge_count,
            self.seed.communities,
            self.replicate_count,
            self.master_seed
        );
        let _ = writeln!(
            out,
            "{:<10} {:>20} {:>20} {:>20}",
            "model", "RMSE{d}", "Q", "RMSE{cc_d}"
        );
        let _ = writeln!(
            out,
            "{:<10} {:>20} {:>20} {:>20}",
            "true",
            "NA",
            format!("{:.4}", self.seed.modularity),
            "NA"
        );
        for row in &self.rows {
            if let Some(err) = &row.error {
                let _ = writeln!(out, "{:<10} failed: {err}", row.model.name());
                continue;
            }
            let _ = writeln!(
                out,
                "{:<10} {:>20} {:>20} {:>20}",
                row.model.name(),
                cell(&row.rmse_degree),
                cell(&row.modularity),
                cell(&row.rmse_ccpd)
            );
        }
        out
    }
}

fn model_row(
    spec: &ExperimentSpec,
    kind: ModelKind,
    seed: &Graph,
    partition: &Partition,
    reference: &SeedReference,
    true_q: f64,
) -> ModelRow {
    let result = FittedModel::fit(kind, seed, partition).and_then(|fitted| {
        (0..spec.replicate_count)
            .into_par_iter()
            .map(|r| run_replicate(spec, kind, &fitted, reference, r))
            .collect::<Result<Vec<_>>>()
    });
    let replicates = match result {
        Ok(replicates) => replicates,
        Err(e) => {
            return ModelRow {
                model: kind,
                error: Some(e.to_string()),
                replicate_count: spec.replicate_count,
                rmse_degree: None,
                modularity: None,
                modularity_abs_error: None,
                rmse_ccpd: None,
                edge_count: None,
                replicates: Vec::new(),
            }
        }
    };
    let collect = |f: &dyn Fn(&ReplicateMetrics) -> Option<f64>| -> Option<Summary> {
        Summary::of(&replicates.iter().filter_map(f).collect::<Vec<_>>())
    };
    ModelRow {
        model: kind,
        error: None,
        replicate_count: spec.replicate_count,
        rmse_degree: collect(&|m| Some(m.rmse_degree)),
        modularity: collect(&|m| m.modularity),
        modularity_abs_error: collect(&|m| m.modularity.map(|q| (q - true_q).abs())),
        rmse_ccpd: collect(&|m| Some(m.rmse_ccpd)),
        edge_count: collect(&|m| Some(m.edge_count as f64)),
        replicates,
    }
}

/// Runs the full comparison. One Louvain partition of the seed is shared by
/// all community models; replicates run in parallel on the current rayon
/// pool.
pub fn run_experiment(seed: &Graph, spec: &ExperimentSpec) -> Result<ComparisonReport> {
    spec.validate()?;
    if seed.edge_count() == 0 {
        return Err(Error::NoEdges("experiment seed graph"));
    }
    let louvain_seed = spec.seed_partition_seed();
    let partition = louvain(seed, &spec.louvain_with(louvain_seed))?;
    let true_q = modularity(seed, &partition)?;
    let reference = SeedReference::of(seed);

    let rows: Vec<ModelRow> = spec
        .models
        .iter()
        .map(|&kind| model_row(spec, kind, seed, &partition, &reference, true_q))
        .collect();
    Ok(ComparisonReport {
        seed: SeedSummary {
            name: spec.seed_name.clone(),
            node_count: seed.node_count(),
            edge_count: seed.edge_count(),
            communities: partition.community_count(),
            louvain_seed,
            modularity: true_q,
        },
        master_seed: spec.master_seed,
        replicate_count: spec.replicate_count,
        louvain: spec.louvain,
        has_failures: rows.iter().any(|r| r.error.is_some()),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Series {
    SeedDegree,
    SimDegree,
    SeedCcpd,
    SimCcpd,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::SeedDegree => "seed-degree",
            Series::SimDegree => "sim-degree",
            Series::SeedCcpd => "seed-ccpd",
            Series::SimCcpd => "sim-ccpd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub series: Series,
    pub degree: usize,
    pub value: f64,
}

/// Degree-distribution and CCPD series of a seed graph and one replicate.
pub fn emit_plot_data(seed: &Graph, replicate: &Graph) -> Vec<PlotRow> {
    let mut rows = Vec::new();
    for (series, g) in [(Series::SeedDegree, seed), (Series::SimDegree, replicate)] {
        rows.extend(degree_distribution(g).iter().map(|(degree, n)| PlotRow {
            series,
            degree,
            value: n as f64,
        }));
    }
    for (series, g) in [(Series::SeedCcpd, seed), (Series::SimCcpd, replicate)] {
        rows.extend(
            ccpd::<f64>(g)
                .iter()
                .map(|(degree, value)| PlotRow { series, degree, value }),
        );
    }
    rows
}

pub fn plot_data_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("series,degree,value\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{}", row.series.name(), row.degree, row.value);
    }
    out
}
