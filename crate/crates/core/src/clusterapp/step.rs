use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::schema::{cluster_design_schema, AssignRule, ClusterDesign, Init, UpdateRule};
use crate::cluster_metrics::{clustering_accuracy, Clustering};
use crate::controller::ApplicationAlgorithm;
use crate::design::{Design, GeneSchema};
use crate::distance::Metric;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, indexed_rng, Stream};

/// Running state of the clustering algorithm between timesteps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterState {
    /// `None` until the first step has initialised centroids.
    pub clustering: Option<Clustering>,
    pub iteration: usize,
    pub seed: u64,
}

impl ClusterState {
    pub fn new(seed: u64) -> Self {
        ClusterState {
            clustering: None,
            iteration: 0,
            seed,
        }
    }

    /// Start from explicit centroids; assignments are filled by the first step.
    pub fn with_centroids(seed: u64, centroids: Vec<Vec<f64>>) -> Self {
        let k = centroids.len();
        ClusterState {
            clustering: Some(Clustering {
                assignments: Vec::new(),
                centroids,
                k,
            }),
            iteration: 0,
            seed,
        }
    }

    pub fn centroids(&self) -> Option<&[Vec<f64>]> {
        self.clustering.as_ref().map(|c| c.centroids.as_slice())
    }
}

/// Initial centroids for `design`. Deterministic in `rng`.
pub fn initial_centroids<R: Rng + ?Sized>(
    design: &ClusterDesign,
    dataset: &LabeledDataset,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let k = design.k;
    let x = &dataset.features;
    match design.init {
        Init::UniformRandom => {
            let bounds = dataset.bounds();
            (0..k)
                .map(|_| {
                    bounds
                        .iter()
                        .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
                        .collect()
                })
                .collect()
        }
        Init::SamplePoints => {
            if x.len() >= k {
                sample_indices(rng, x.len(), k).iter().map(|i| x[i].clone()).collect()
            } else {
                (0..k).map(|_| x[rng.random_range(0..x.len())].clone()).collect()
            }
        }
        Init::SpreadMaximal => {
            let mut chosen = vec![x[rng.random_range(0..x.len())].clone()];
            let mut nearest: Vec<f64> =
                x.iter().map(|p| design.metric.distance(p, &chosen[0])).collect();
            while chosen.len() < k {
                let mut best = 0;
                for i in 1..x.len() {
                    if nearest[i] > nearest[best] {
                        best = i;
                    }
                }
                let c = x[best].clone();
                for (d, p) in nearest.iter_mut().zip(x) {
                    *d = d.min(design.metric.distance(p, &c));
                }
                chosen.push(c);
            }
            chosen
        }
    }
}

fn distance_matrix(x: &[Vec<f64>], centroids: &[Vec<f64>], metric: Metric) -> Vec<Vec<f64>> {
    x.iter()
        .map(|p| centroids.iter().map(|c| metric.distance(p, c)).collect())
        .collect()
}

/// Index of the smallest entry; ties go to the lowest index.
fn argmin(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v < row[best] {
            best = j;
        }
    }
    best
}

/// Re-seed every empty cluster at the point farthest from its nearest
/// centroid, then reassign. Repeats at most `k` rounds.
fn repair_empty(
    x: &[Vec<f64>],
    centroids: &mut [Vec<f64>],
    dist: &mut [Vec<f64>],
    labels: &mut [usize],
    metric: Metric,
) {
    let k = centroids.len();
    for _ in 0..k {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
        if empty.is_empty() {
            return;
        }
        let mut taken = vec![false; x.len()];
        for j in empty {
            let mut far: Option<usize> = None;
            for i in 0..x.len() {
                if taken[i] || counts[labels[i]] < 2 {
                    continue;
                }
                if far.is_none_or(|f| dist[i][labels[i]] > dist[f][labels[f]]) {
                    far = Some(i);
                }
            }
            let Some(i) = far else { return };
            taken[i] = true;
            counts[labels[i]] -= 1;
            counts[j] += 1;
            centroids[j] = x[i].clone();
            for (row, p) in dist.iter_mut().zip(x) {
                row[j] = metric.distance(p, &centroids[j]);
            }
            labels[i] = j;
        }
        for (l, row) in labels.iter_mut().zip(dist.iter()) {
            *l = argmin(row);
        }
    }
}

/// Soft responsibilities `exp(-(d_ij - d_i,min) / tau)` normalised per point,
/// with `tau` the mean nearest-centroid distance. Falls back to hard weights
/// when `tau` is zero.
fn soft_weights(dist: &[Vec<f64>], labels: &[usize]) -> Vec<Vec<f64>> {
    let n = dist.len();
    let tau = dist.iter().zip(labels).map(|(r, &l)| r[l]).sum::<f64>() / n as f64;
    dist.iter()
        .zip(labels)
        .map(|(row, &l)| {
            if tau <= 0.0 || !tau.is_finite() {
                let mut w = vec![0.0; row.len()];
                w[l] = 1.0;
                return w;
            }
            let dmin = row[l];
            let mut w: Vec<f64> = row.iter().map(|&d| (-(d - dmin) / tau).exp()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            w
        })
        .collect()
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Smallest value whose cumulative weight reaches half the total.
fn weighted_median(pairs: &mut [(f64, f64)]) -> Option<f64> {
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if total <= 0.0 {
        return None;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    for &(v, w) in pairs.iter() {
        acc += w;
        if acc >= 0.5 * total {
            return Some(v);
        }
    }
    pairs.last().map(|p| p.0)
}

fn update_centroids(
    x: &[Vec<f64>],
    centroids: &mut [Vec<f64>],
    labels: &[usize],
    weights: Option<&[Vec<f64>]>,
    design: &ClusterDesign,
) {
    let k = centroids.len();
    let d = centroids.first().map_or(0, Vec::len);
    match (design.update, weights) {
        (UpdateRule::Mean, None) => {
            let mut sums = vec![vec![0.0; d]; k];
            let mut counts = vec![0usize; k];
            for (p, &l) in x.iter().zip(labels) {
                counts[l] += 1;
                for (s, v) in sums[l].iter_mut().zip(p) {
                    *s += v;
                }
            }
            for j in 0..k {
                if counts[j] > 0 {
                    for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                        *c = s / counts[j] as f64;
                    }
                }
            }
        }
        (UpdateRule::Mean, Some(w)) => {
            for j in 0..k {
                let mut sum = vec![0.0; d];
                let mut total = 0.0;
                for (p, wi) in x.iter().zip(w) {
                    total += wi[j];
                    for (s, v) in sum.iter_mut().zip(p) {
                        *s += wi[j] * v;
                    }
                }
                if total > 0.0 {
                    for (c, s) in centroids[j].iter_mut().zip(sum) {
                        *c = s / total;
                    }
                }
            }
        }
        (UpdateRule::Median, None) => {
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
            for (i, &l) in labels.iter().enumerate() {
                members[l].push(i);
            }
            for j in 0..k {
                if members[j].is_empty() {
                    continue;
                }
                for dim in 0..d {
                    let mut vals: Vec<f64> = members[j].iter().map(|&i| x[i][dim]).collect();
                    centroids[j][dim] = median_of(&mut vals);
                }
            }
        }
        (UpdateRule::Median, Some(w)) => {
            for j in 0..k {
                for dim in 0..d {
                    let mut pairs: Vec<(f64, f64)> =
                        x.iter().zip(w).map(|(p, wi)| (p[dim], wi[j])).collect();
                    if let Some(m) = weighted_median(&mut pairs) {
                        centroids[j][dim] = m;
                    }
                }
            }
        }
        (UpdateRule::OnlineEta, w) => {
            for (i, p) in x.iter().enumerate() {
                for j in 0..k {
                    let wij = match w {
                        Some(w) => w[i][j],
                        None if labels[i] == j => 1.0,
                        None => continue,
                    };
                    let rate = design.eta * wij;
                    for (c, v) in centroids[j].iter_mut().zip(p) {
                        *c += rate * (v - *c);
                    }
                }
            }
        }
    }
}

/// One clustering iteration under `design`: assign, repair empty clusters,
/// update centroids. Returns the next state and the accuracy of this step's
/// assignments.
///
/// Centroids are (re)initialised when the state has none or its `k` differs
/// from the design's; the initialisation RNG depends only on the state's
/// seed and iteration, so a lookahead reproduces the real step exactly.
pub fn cluster_step(
    state: &ClusterState,
    design: &ClusterDesign,
    dataset: &LabeledDataset,
) -> Result<(ClusterState, f64)> {
    if design.k == 0 {
        return Err(Error::InvalidConfig("k must be positive".into()));
    }
    let x = &dataset.features;
    let mut centroids = match &state.clustering {
        Some(c) if c.centroids.len() == design.k => c.centroids.clone(),
        _ => {
            let mut rng = indexed_rng(
                derive_seed(state.seed, state.iteration as u64),
                Stream::Application as u64,
            );
            initial_centroids(design, dataset, &mut rng)
        }
    };
    let mut dist = distance_matrix(x, &centroids, design.metric);
    let mut labels: Vec<usize> = dist.iter().map(|r| argmin(r)).collect();
    repair_empty(x, &mut centroids, &mut dist, &mut labels, design.metric);

    let weights = match design.assignment {
        AssignRule::HardNearest => None,
        AssignRule::SoftmaxWeighted => Some(soft_weights(&dist, &labels)),
    };
    update_centroids(x, &mut centroids, &labels, weights.as_deref(), design);
    if centroids.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("centroid update produced non-finite values".into()));
    }

    let performance = clustering_accuracy(&labels, &dataset.labels);
    let next = ClusterState {
        clustering: Some(Clustering::new(labels, centroids)),
        iteration: state.iteration + 1,
        seed: state.seed,
    };
    Ok((next, performance))
}

/// [`cluster_step`] on an encoded design; the design must satisfy the
/// clustering schema.
pub fn app_step(
    state: &ClusterState,
    design: &Design,
    dataset: &LabeledDataset,
) -> Result<(ClusterState, f64)> {
    cluster_step(state, &ClusterDesign::decode(design)?, dataset)
}

/// One-iteration lookahead: the accuracy `design` would reach from `state`.
/// The state itself is not advanced.
pub fn ga_fitness_for_timestep(
    design: &Design,
    state: &ClusterState,
    dataset: &LabeledDataset,
) -> Result<f64> {
    app_step(state, design, dataset).map(|(_, p)| p)
}

/// The clustering algorithm as a controllable application.
#[derive(Debug, Clone)]
pub struct ClusterApp {
    schema: GeneSchema,
    pub state: ClusterState,
    /// Design of the most recent executed step.
    pub last_design: Option<ClusterDesign>,
}

impl ClusterApp {
    pub fn new(seed: u64) -> Self {
        ClusterApp {
            schema: cluster_design_schema(),
            state: ClusterState::new(derive_seed(seed, Stream::Application as u64)),
            last_design: None,
        }
    }

    pub fn clustering(&self) -> Option<&Clustering> {
        self.state.clustering.as_ref()
    }
}

impl ApplicationAlgorithm for ClusterApp {
    fn schema(&self) -> &GeneSchema {
        &self.schema
    }

    fn reset(&mut self, _dataset: &LabeledDataset, seed: u64) -> Result<()> {
        self.state = ClusterState::new(derive_seed(seed, Stream::Application as u64));
        self.last_design = None;
        Ok(())
    }

    fn exec(&mut self, design: &Design, dataset: &LabeledDataset, _t: usize) -> Result<f64> {
        let typed = ClusterDesign::decode(design)?;
        let (next, p) = cluster_step(&self.state, &typed, dataset)?;
        self.state = next;
        self.last_design = Some(typed);
        Ok(p)
    }

    fn lookahead(&self, design: &Design, dataset: &LabeledDataset) -> f64 {
        ga_fitness_for_timestep(design, &self.state, dataset).unwrap_or(f64::NAN)
    }
}
