//! Composable iterative clustering algorithm used as the controlled
//! application, with dataset generation, loading and folding.

mod dataset;
mod extractor;
mod schema;
mod step;

pub use dataset::{generate_blobs, load_csv, stratified_two_folds, LabeledDataset};
pub use extractor::{clustering_features, clustering_schema, ClusterFeatureExtractor, CLUSTERING_FEATURES};
pub use schema::{
    cluster_design_schema, AssignRule, ClusterDesign, Init, UpdateRule, ETA_MAX, ETA_MIN, K_MAX,
    K_MIN, SCHEMA_ID,
};
pub use step::{
    app_step, cluster_step, ga_fitness_for_timestep, initial_centroids, ClusterApp, ClusterState,
};
