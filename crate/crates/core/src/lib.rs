//! Random graph models for community-structured networks.
//!
//! Erdős–Rényi, Chung–Lu, BTER, GBTER and EGBTER generators, the metrics used
//! to compare a synthetic replica against its seed network (degree and CCPD
//! RMSE, modularity under Louvain), readers/writers for SNAP and Matrix
//! Market inputs, and a replicate-sweep harness.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod cli;
pub mod community;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod models;
pub mod num;
pub mod partition;
pub mod sampling;

pub use community::{louvain, louvain_with_trace, LouvainConfig, LouvainOutcome};
pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use metrics::DegreeDistribution;
pub use models::gbter::FitMode;
pub use num::Real;
pub use partition::Partition;
pub use sampling::RngStream;

pub type CcpdDistribution = metrics::CcpdDistribution<f64>;
pub type ClWeights = models::baseline::ClWeights<f64>;
pub type BterParams = models::bter::BterParams<f64>;
pub type BterGroups = models::bter::BterGroups<f64>;
pub type AffinityGroup = models::bter::AffinityGroup<f64>;
pub type GbterParams = models::gbter::GbterParams<f64>;
pub type EgbterParams = models::egbter::EgbterParams<f64>;
pub type EgbterPlan = models::egbter::EgbterPlan<f64>;
