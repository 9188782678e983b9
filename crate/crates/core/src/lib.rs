//! Automatic selection of software protections for application assets.
//!
//! The crate models a protection knowledge base ([`kb`]) and an application
//! under protection ([`model`]), partitions the assets into code correlation
//! sets ([`prep`]), predicts metrics and overheads of candidate solutions
//! ([`metrics`], [`overhead`]), scores states with the software protection
//! index ([`index`]), streams candidate solutions ([`solspace`]) and solves
//! the defender-vs-attacker game with a mini-max search ([`explorer`]).

pub mod error;
pub mod explorer;
pub mod ids;
pub mod index;
pub mod kb;
pub mod metrics;
pub mod model;
pub mod overhead;
pub mod prep;
pub mod solspace;
pub mod synth;

mod hash;
mod solution;
mod union_find;

pub use error::{Error, Result};
pub use ids::{ArtifactId, AspId, CpId, PathId, StepId};
pub use index::{IndexConfig, Measure, MeasureParams, SpIndex, State};
pub use kb::{
    AbstractProtection, ArtifactKind, ConcreteProtection, KnowledgeBase, Precedence,
    SecurityRequirement,
};
pub use metrics::Metric;
pub use model::{
    ApplicationModel, Artifact, AttackPath, ConcreteAttackPath, MetricVector, ProtectionObjective,
};
pub use overhead::OverheadType;
pub use prep::{CcsPartition, CodeCorrelationSet};
pub use solution::{DeployedProtection, Solution};
