//! Application-agnostic meta-features: exploratory landscape analysis over a
//! Latin hypercube sample of centroid space, plus dataset statistics.

mod ela;
mod lhs;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clusterapp::LabeledDataset;
use crate::cluster_metrics::clustering_accuracy;
use crate::distance::Metric;
use crate::error::{Error, Result};

pub use ela::*;
pub use lhs::latin_hypercube_sample;

/// Default landscape sample size.
pub const DEFAULT_SAMPLES: usize = 64;

/// Value stored for an undefined feature.
pub const SENTINEL: f64 = 0.0;

/// Ordered feature names; the column layout of every [`MetaFeatureVector`]
/// produced under it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
}

impl FeatureSchema {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        FeatureSchema {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn concat(&self, other: &FeatureSchema) -> FeatureSchema {
        FeatureSchema {
            names: self.names.iter().chain(&other.names).cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schema serialises")
    }
}

/// Finite feature values with a parallel validity mask. Undefined or
/// non-finite raw values are stored as [`SENTINEL`] with `valid = false`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetaFeatureVector {
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl MetaFeatureVector {
    pub fn from_raw(raw: &[Option<f64>]) -> Self {
        let mut v = MetaFeatureVector::default();
        v.extend(raw.iter().copied());
        v
    }

    pub fn push(&mut self, raw: Option<f64>) {
        match raw {
            Some(x) if x.is_finite() => {
                self.values.push(x);
                self.valid.push(true);
            }
            _ => {
                self.values.push(SENTINEL);
                self.valid.push(false);
            }
        }
    }

    pub fn extend(&mut self, raw: impl IntoIterator<Item = Option<f64>>) {
        for r in raw {
            self.push(r);
        }
    }

    pub fn append(&mut self, other: &MetaFeatureVector) {
        self.values.extend_from_slice(&other.values);
        self.valid.extend_from_slice(&other.valid);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_width(&self, schema: &FeatureSchema) -> Result<()> {
        if self.len() != schema.len() || self.valid.len() != schema.len() {
            return Err(Error::FeatureWidth {
                expected: schema.len(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    /// (max class count − min class count) / instances
    pub imbalance: f64,
    pub classes: usize,
    pub instances: usize,
}

pub fn dataset_stats(dataset: &LabeledDataset) -> DatasetStats {
    let counts: Vec<usize> = dataset.class_counts().into_iter().filter(|&c| c > 0).collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    let n = dataset.len();
    DatasetStats {
        imbalance: if n == 0 { 0.0 } else { (max - min) as f64 / n as f64 },
        classes: counts.len(),
        instances: n,
    }
}

/// Search-space bounds for `k` centroids: the dataset's per-dimension range
/// repeated `k` times. Zero-width dimensions are widened by ±0.5.
pub fn centroid_bounds(dataset: &LabeledDataset, k: usize) -> Vec<(f64, f64)> {
    let per_dim: Vec<(f64, f64)> = dataset
        .bounds()
        .into_iter()
        .map(|(lo, hi)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) })
        .collect();
    (0..k).flat_map(|_| per_dim.iter().copied()).collect()
}

/// Accuracy of assigning each instance to its nearest centroid of the
/// flattened centroid set `x` (`k` blocks of the dataset's dimension).
pub fn landscape_objective(dataset: &LabeledDataset, x: &[f64], metric: Metric) -> f64 {
    let d = dataset.dim();
    let centroids: Vec<&[f64]> = x.chunks(d).collect();
    let labels: Vec<usize> = dataset
        .features
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let dist = metric.distance(p, c);
                if dist < best_d {
                    best_d = dist;
                    best = j;
                }
            }
            best
        })
        .collect();
    clustering_accuracy(&labels, &dataset.labels)
}

/// Latin hypercube sample of `n_s` centroid sets and the accuracy each
/// achieves under nearest-centroid assignment with `metric`.
pub fn build_landscape<R: Rng + ?Sized>(
    dataset: &LabeledDataset,
    metric: Metric,
    k: usize,
    n_s: usize,
    rng: &mut R,
) -> Result<LandscapeSample> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("landscape needs k >= 1".into()));
    }
    let bounds = centroid_bounds(dataset, k);
    let xs = latin_hypercube_sample(n_s, &bounds, rng)?;
    let ys = xs.iter().map(|x| landscape_objective(dataset, x, metric)).collect();
    LandscapeSample::new(xs, ys, bounds)
}

pub const AGNOSTIC_FEATURES: [&str; 31] = [
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.coef.min",
    "ela_meta.quad_simple.coef.max",
    "disp.ratio_mean_02",
    "disp.ratio_mean_05",
    "disp.ratio_mean_10",
    "disp.ratio_mean_25",
    "disp.diff_mean_02",
    "disp.diff_mean_05",
    "disp.diff_mean_10",
    "disp.diff_mean_25",
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.eps_ratio",
    "ic.m0",
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.indegree_cv",
    "data.imbalance",
    "data.classes",
    "data.instances",
    "data.timestep",
];

pub fn agnostic_schema() -> FeatureSchema {
    FeatureSchema::new(AGNOSTIC_FEATURES)
}

/// The application-agnostic feature block for a landscape sample, dataset
/// and timestep, in [`AGNOSTIC_FEATURES`] order. Feature groups whose
/// computation fails are undefined.
pub fn agnostic_features(
    sample: &LandscapeSample,
    stats: &DatasetStats,
    timestep: usize,
) -> MetaFeatureVector {
    let mut out = MetaFeatureVector::default();
    match ela_y_distribution(sample) {
        Ok(y) => out.extend([Some(y.skewness), Some(y.kurtosis), Some(y.n_peaks as f64)]),
        Err(_) => out.extend([None; 3]),
    }
    match ela_meta_model(sample) {
        Ok(m) => out.extend([
            m.r2_lin_adj,
            m.lin_coef_min,
            m.lin_coef_max,
            m.r2_quad_adj,
            m.quad_coef_min,
            m.quad_coef_max,
        ]),
        Err(_) => out.extend([None; 6]),
    }
    match ela_dispersion(sample) {
        Ok(d) => {
            out.extend(d.ratio);
            out.extend(d.diff);
        }
        Err(_) => out.extend([None; 8]),
    }
    match ela_information_content(sample) {
        Ok(ic) => out.extend([
            Some(ic.h_max),
            ic.eps_s,
            ic.settling_sensitivity,
            ic.m0_ratio,
            Some(ic.initial_partial_information),
        ]),
        Err(_) => out.extend([None; 5]),
    }
    match ela_nbc(sample) {
        Ok(n) => out.extend([n.sd_ratio, n.mean_ratio, n.dist_correlation, n.cv_ratio, n.indegree_cv]),
        Err(_) => out.extend([None; 5]),
    }
    out.extend([
        Some(stats.imbalance),
        Some(stats.classes as f64),
        Some(stats.instances as f64),
        Some(timestep as f64),
    ]);
    debug_assert_eq!(out.len(), AGNOSTIC_FEATURES.len());
    out
}
