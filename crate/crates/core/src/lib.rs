//! Meta-learner gated real-time AutoML.
//!
//! A genetic algorithm composes an iterative clustering algorithm one
//! timestep at a time. OnMAR consults a meta-learner trained on past
//! timesteps and skips the GA when the current design is predicted to
//! perform well enough; OffMAR learns designs offline on one fold and then
//! runs the second fold with meta-learner predictions only.

pub mod cluster_metrics;
pub mod clusterapp;
pub mod controller;
pub mod design;
pub mod distance;
pub mod error;
pub mod ga;
pub mod metafeatures;
pub mod metalearners;
pub mod rng;

pub use controller::{
    kr_prune, offmar_phase1, offmar_phase2, offmar_run, onmar_run, prune_or_best,
    train_design_model, ApplicationAlgorithm, DesignEngine, KnowledgeEntry, KnowledgeRepository,
    MetaFeatureExtractor, OffmarOutput, RunConfig, RunLog, RunOutput, TimestepRecord,
};
pub use design::{Design, Gene, GeneSchema, GeneSpec};
pub use error::{Error, Result};
pub use ga::{GaEngine, GaParams};
