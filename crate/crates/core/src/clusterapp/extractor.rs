use super::dataset::LabeledDataset;
use super::schema::{K_MAX, K_MIN};
use super::step::ClusterApp;
use crate::cluster_metrics::{
    centroid_distance_features, clustering_accuracy, external_scores, internal_scores,
    intersection_cardinalities, pair_confusion, pmf_features, Clustering,
};
use crate::controller::MetaFeatureExtractor;
use crate::distance::Metric;
use crate::error::Result;
use crate::metafeatures::{
    agnostic_features, agnostic_schema, build_landscape, dataset_stats, FeatureSchema,
    MetaFeatureVector, DEFAULT_SAMPLES,
};
use crate::rng::{derive_seed, indexed_rng, Stream};

pub const CLUSTERING_FEATURES: [&str; 29] = [
    "cl.external.ari",
    "cl.external.ami",
    "cl.external.homogeneity",
    "cl.external.completeness",
    "cl.external.v_measure",
    "cl.external.fowlkes_mallows",
    "cl.internal.silhouette",
    "cl.internal.davies_bouldin",
    "cl.internal.calinski_harabasz",
    "cl.pairs.same_same",
    "cl.pairs.same_diff",
    "cl.pairs.diff_same",
    "cl.pairs.diff_diff",
    "cl.intersection.max",
    "cl.intersection.mean",
    "cl.intersection.entropy",
    "cl.centroids.cosine",
    "cl.centroids.euclidean",
    "cl.centroids.minkowski_p3",
    "cl.centroids.manhattan",
    "cl.centroids.hamming",
    "cl.pmf.bernoulli",
    "cl.pmf.laplacian",
    "cl.pmf.zeta",
    "cl.pmf.poisson",
    "cl.pmf.planck",
    "cl.pmf.logarithmic_series",
    "cl.pmf.yule_simon",
    "cl.accuracy",
];

pub fn clustering_schema() -> FeatureSchema {
    FeatureSchema::new(CLUSTERING_FEATURES)
}

/// Clustering-specific feature block in [`CLUSTERING_FEATURES`] order. Pair
/// counts are fractions of all instance pairs, split by (same true class,
/// same cluster).
pub fn clustering_features(clustering: &Clustering, dataset: &LabeledDataset) -> MetaFeatureVector {
    let pred = &clustering.assignments;
    let truth = &dataset.labels;
    let mut out = MetaFeatureVector::default();
    match external_scores(pred, truth) {
        Ok(e) => out.extend(
            [e.ari, e.ami, e.homogeneity, e.completeness, e.v_measure, e.fowlkes_mallows].map(Some),
        ),
        Err(_) => out.extend([None; 6]),
    }
    let internal = internal_scores(&dataset.features, clustering);
    out.extend([internal.silhouette, internal.davies_bouldin, internal.calinski_harabasz]);

    let pc = pair_confusion(pred, truth);
    let n = pred.len() as f64;
    let pairs = n * (n - 1.0) / 2.0;
    let frac = |c: u64| (pairs > 0.0).then(|| c as f64 / pairs);
    out.extend([frac(pc[0][0]), frac(pc[0][1]), frac(pc[1][0]), frac(pc[1][1])]);

    let inter = intersection_cardinalities(pred, truth);
    out.extend([Some(inter.max), Some(inter.mean), Some(inter.entropy)]);

    match centroid_distance_features(clustering) {
        Ok(c) => out.extend([
            c.cosine,
            Some(c.euclidean),
            Some(c.minkowski_p3),
            Some(c.manhattan),
            Some(c.hamming),
        ]),
        Err(_) => out.extend([None; 5]),
    }
    out.extend(pmf_features(pred).values());
    out.push(Some(clustering_accuracy(pred, truth)));
    debug_assert_eq!(out.len(), CLUSTERING_FEATURES.len());
    out
}

/// Meta-features of the clustering application: the agnostic block over a
/// landscape sampled for the current design, followed by the clustering
/// block of the current partition. Before the first step the landscape uses
/// Euclidean distance with `k` = number of classes (clamped to the schema
/// range) and the clustering block is undefined.
#[derive(Debug, Clone)]
pub struct ClusterFeatureExtractor {
    pub n_samples: usize,
    seed: u64,
}

impl ClusterFeatureExtractor {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        ClusterFeatureExtractor { n_samples, seed }
    }
}

impl Default for ClusterFeatureExtractor {
    fn default() -> Self {
        ClusterFeatureExtractor::new(DEFAULT_SAMPLES, 0)
    }
}

impl MetaFeatureExtractor<ClusterApp> for ClusterFeatureExtractor {
    fn schema(&self) -> FeatureSchema {
        agnostic_schema().concat(&clustering_schema())
    }

    fn reset(&mut self, seed: u64) {
        self.seed = seed;
    }

    fn extract(&mut self, app: &ClusterApp, dataset: &LabeledDataset, t: usize) -> Result<MetaFeatureVector> {
        let (metric, k) = match &app.last_design {
            Some(d) => (d.metric, d.k),
            None => (Metric::Euclidean, dataset.classes().clamp(K_MIN, K_MAX)),
        };
        let mut rng = indexed_rng(derive_seed(self.seed, t as u64), Stream::Landscape as u64);
        let sample = build_landscape(dataset, metric, k, self.n_samples, &mut rng)?;
        let mut out = agnostic_features(&sample, &dataset_stats(dataset), t);
        match app.clustering() {
            Some(c) if c.assignments.len() == dataset.len() => {
                out.append(&clustering_features(c, dataset))
            }
            _ => out.extend([None; CLUSTERING_FEATURES.len()]),
        }
        Ok(out)
    }
}
