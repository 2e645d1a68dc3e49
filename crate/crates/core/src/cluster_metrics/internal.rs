use serde::{Deserialize, Serialize};

use super::Clustering;
use crate::distance::{euclidean, squared_euclidean};

/// Internal validity indices; `None` marks an undefined value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InternalScores {
    pub silhouette: Option<f64>,
    pub davies_bouldin: Option<f64>,
    pub calinski_harabasz: Option<f64>,
}

/// Silhouette, Davies-Bouldin and Calinski-Harabasz under the Euclidean
/// metric. Empty clusters are dropped first; with fewer than two occupied
/// clusters every score is undefined.
pub fn internal_scores(data: &[Vec<f64>], clustering: &Clustering) -> InternalScores {
    let n = data.len();
    assert_eq!(n, clustering.assignments.len());
    let mut occupied: Vec<usize> = clustering.assignments.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let k = occupied.len();
    if k < 2 || n < 2 {
        return InternalScores::default();
    }
    let labels: Vec<usize> = clustering
        .assignments
        .iter()
        .map(|l| occupied.binary_search(l).unwrap())
        .collect();
    let dim = data[0].len();

    let mut sizes = vec![0usize; k];
    let mut centroids = vec![vec![0.0; dim]; k];
    for (x, &l) in data.iter().zip(&labels) {
        sizes[l] += 1;
        for (c, v) in centroids[l].iter_mut().zip(x) {
            *c += v;
        }
    }
    for (c, &s) in centroids.iter_mut().zip(&sizes) {
        c.iter_mut().for_each(|v| *v /= s as f64);
    }

    InternalScores {
        silhouette: Some(silhouette(data, &labels, &sizes)),
        davies_bouldin: davies_bouldin(data, &labels, &sizes, &centroids),
        calinski_harabasz: calinski_harabasz(data, &labels, &sizes, &centroids),
    }
}

fn silhouette(data: &[Vec<f64>], labels: &[usize], sizes: &[usize]) -> f64 {
    let k = sizes.len();
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for (i, x) in data.iter().enumerate() {
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (j, y) in data.iter().enumerate() {
            if i != j {
                sums[labels[j]] += euclidean(x, y);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / data.len() as f64
}

fn davies_bouldin(
    data: &[Vec<f64>],
    labels: &[usize],
    sizes: &[usize],
    centroids: &[Vec<f64>],
) -> Option<f64> {
    let k = sizes.len();
    let mut scatter = vec![0.0; k];
    for (x, &l) in data.iter().zip(labels) {
        scatter[l] += euclidean(x, &centroids[l]);
    }
    for (s, &n) in scatter.iter_mut().zip(sizes) {
        *s /= n as f64;
    }
    if scatter.iter().all(|&s| s == 0.0) {
        return None;
    }
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i == j {
                continue;
            }
            let sep = euclidean(&centroids[i], &centroids[j]);
            if sep == 0.0 {
                return None;
            }
            worst = worst.max((scatter[i] + scatter[j]) / sep);
        }
        total += worst;
    }
    Some(total / k as f64)
}

fn calinski_harabasz(
    data: &[Vec<f64>],
    labels: &[usize],
    sizes: &[usize],
    centroids: &[Vec<f64>],
) -> Option<f64> {
    let n = data.len();
    let k = sizes.len();
    if n <= k {
        return None;
    }
    let dim = data[0].len();
    let mut mean = vec![0.0; dim];
    for x in data {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / n as f64;
        }
    }
    let between: f64 = centroids
        .iter()
        .zip(sizes)
        .map(|(c, &s)| s as f64 * squared_euclidean(c, &mean))
        .sum();
    let within: f64 = data
        .iter()
        .zip(labels)
        .map(|(x, &l)| squared_euclidean(x, &centroids[l]))
        .sum();
    if within == 0.0 {
        return None;
    }
    Some(between * (n - k) as f64 / (within * (k - 1) as f64))
}
