//! Clustering validity indices and clustering-specific meta-features:
//! external and internal scores, pair confusion, intersection
//! cardinalities, centroid distances, size-distribution PMF features and
//! clustering accuracy.

mod assignment;
mod internal;
mod pmf;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distance;
use crate::error::{Error, Result};

pub use assignment::max_weight_assignment;
pub use internal::{internal_scores, InternalScores};
pub use pmf::{pmf_features, PmfFeatures};

/// A hard partition of the instances plus the centroids that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub k: usize,
}

impl Clustering {
    pub fn new(assignments: Vec<usize>, centroids: Vec<Vec<f64>>) -> Self {
        let k = centroids.len();
        debug_assert!(assignments.iter().all(|&a| a < k));
        Clustering {
            assignments,
            centroids,
            k,
        }
    }
}

/// Contingency table between two labelings, over occupied labels only.
/// Rows are predicted clusters, columns are true classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Contingency {
    pub table: Vec<Vec<u64>>,
    pub n: u64,
}

impl Contingency {
    pub fn new(pred: &[usize], truth: &[usize]) -> Self {
        assert_eq!(pred.len(), truth.len(), "labelings differ in length");
        let rows = compact(pred);
        let cols = compact(truth);
        let nr = rows.iter().max().map_or(0, |m| m + 1);
        let nc = cols.iter().max().map_or(0, |m| m + 1);
        let mut table = vec![vec![0u64; nc]; nr];
        for (r, c) in rows.iter().zip(&cols) {
            table[*r][*c] += 1;
        }
        Contingency {
            table,
            n: pred.len() as u64,
        }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let nc = self.table.first().map_or(0, Vec::len);
        (0..nc).map(|j| self.table.iter().map(|r| r[j]).sum()).collect()
    }
}

/// Map labels to `0..distinct` in order of increasing label value.
fn compact(labels: &[usize]) -> Vec<usize> {
    let mut uniq: Vec<usize> = labels.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    labels
        .iter()
        .map(|l| uniq.binary_search(l).unwrap())
        .collect()
}

fn comb2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Unordered pair counts, indexed `[truth same/diff][pred same/diff]`.
pub fn pair_confusion(pred: &[usize], truth: &[usize]) -> [[u64; 2]; 2] {
    let c = Contingency::new(pred, truth);
    let both: u64 = c.table.iter().flatten().map(|&x| comb2(x)).sum();
    let pred_same: u64 = c.row_sums().into_iter().map(comb2).sum();
    let truth_same: u64 = c.col_sums().into_iter().map(comb2).sum();
    let total = comb2(c.n);
    [
        [both, truth_same - both],
        [pred_same - both, total + both - truth_same - pred_same],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalScores {
    pub ari: f64,
    pub ami: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub fowlkes_mallows: f64,
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mutual_information(c: &Contingency) -> f64 {
    let n = c.n as f64;
    let a = c.row_sums();
    let b = c.col_sums();
    let mut mi = 0.0;
    for (i, row) in c.table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (a[i] as f64 * b[j] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Expected mutual information under the hypergeometric model of
/// randomness, for the marginals of `c`.
fn expected_mutual_information(c: &Contingency) -> f64 {
    let n = c.n;
    let nf = n as f64;
    let lf = |x: u64| ln_gamma(x as f64 + 1.0);
    let ln_n_fact = lf(n);
    let mut emi = 0.0;
    for &ai in &c.row_sums() {
        for &bj in &c.col_sums() {
            let lo = (ai + bj).saturating_sub(n).max(1);
            let hi = ai.min(bj);
            let fixed = lf(ai) + lf(bj) + lf(n - ai) + lf(n - bj) - ln_n_fact;
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (ai as f64 * bj as f64)).ln();
                let log_p = fixed
                    - lf(nij)
                    - lf(ai - nij)
                    - lf(bj - nij)
                    - lf(n + nij - ai - bj);
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// ARI, AMI (arithmetic normalisation), homogeneity, completeness,
/// V-measure and Fowlkes-Mallows of `pred` against `truth`.
pub fn external_scores(pred: &[usize], truth: &[usize]) -> Result<ExternalScores> {
    if pred.len() != truth.len() {
        return Err(Error::InsufficientSamples(format!(
            "labelings differ in length ({} vs {})",
            pred.len(),
            truth.len()
        )));
    }
    if pred.len() < 2 {
        return Err(Error::InsufficientSamples(
            "external scores need at least two instances".into(),
        ));
    }
    let c = Contingency::new(pred, truth);
    let n = c.n as f64;
    let rows = c.row_sums();
    let cols = c.col_sums();

    let [[tp, fn_], [fp, tn]] = pair_confusion(pred, truth);
    let (tp, fn_, fp, tn) = (tp as f64, fn_ as f64, fp as f64, tn as f64);
    let ari = if fn_ == 0.0 && fp == 0.0 {
        1.0
    } else {
        2.0 * (tp * tn - fn_ * fp) / ((tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn))
    };

    let h_pred = entropy(&rows, n);
    let h_true = entropy(&cols, n);
    let mi = mutual_information(&c);
    let homogeneity = if h_true == 0.0 { 1.0 } else { (mi / h_true).min(1.0) };
    let completeness = if h_pred == 0.0 { 1.0 } else { (mi / h_pred).min(1.0) };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };

    let ami = if (rows.len() == 1 && cols.len() == 1)
        || (rows.len() as u64 == c.n && cols.len() as u64 == c.n)
    {
        1.0
    } else {
        let emi = expected_mutual_information(&c);
        let mut denom = 0.5 * (h_pred + h_true) - emi;
        denom = if denom < 0.0 {
            denom.min(-f64::EPSILON)
        } else {
            denom.max(f64::EPSILON)
        };
        (mi - emi) / denom
    };

    let sq = |v: &[u64]| v.iter().map(|&x| (x * x) as f64).sum::<f64>();
    let tk = c.table.iter().map(|r| sq(r)).sum::<f64>() - n;
    let pk = sq(&rows) - n;
    let qk = sq(&cols) - n;
    let fowlkes_mallows = if tk == 0.0 {
        0.0
    } else {
        (tk / pk).sqrt() * (tk / qk).sqrt()
    };

    Ok(ExternalScores {
        ari,
        ami,
        homogeneity,
        completeness,
        v_measure,
        fowlkes_mallows,
    })
}

/// Contingency table with summary features.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionTable {
    /// `table[i][j] = |predicted cluster i ∩ true class j|`
    pub table: Vec<Vec<u64>>,
    pub max: f64,
    pub mean: f64,
    /// Shannon entropy (nats) of the table normalised to sum 1.
    pub entropy: f64,
}

pub fn intersection_cardinalities(pred: &[usize], truth: &[usize]) -> IntersectionTable {
    let c = Contingency::new(pred, truth);
    let cells: Vec<u64> = c.table.iter().flatten().copied().collect();
    let max = cells.iter().copied().max().unwrap_or(0) as f64;
    let mean = if cells.is_empty() {
        0.0
    } else {
        cells.iter().sum::<u64>() as f64 / cells.len() as f64
    };
    let entropy = if c.n == 0 {
        0.0
    } else {
        entropy(&cells, c.n as f64)
    };
    IntersectionTable {
        table: c.table,
        max,
        mean,
        entropy,
    }
}

/// Fraction of instances correctly labelled under the best injective
/// mapping of predicted clusters to true classes.
pub fn clustering_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    let c = Contingency::new(pred, truth);
    let weights: Vec<Vec<f64>> = c
        .table
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let (matched, _) = max_weight_assignment(&weights);
    (matched / c.n as f64).clamp(0.0, 1.0)
}

/// Mean pairwise centroid distance under each measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidDistances {
    /// `None` when some centroid is the zero vector.
    pub cosine: Option<f64>,
    pub euclidean: f64,
    pub minkowski_p3: f64,
    pub manhattan: f64,
    /// On sign-binarised centroids.
    pub hamming: f64,
}

pub fn centroid_distance_features(clustering: &Clustering) -> Result<CentroidDistances> {
    let cs = &clustering.centroids;
    if cs.len() < 2 {
        return Err(Error::InsufficientSamples(
            "centroid distances need at least two centroids".into(),
        ));
    }
    let mut sums = [0.0f64; 4];
    let mut cos_sum = Some(0.0);
    let mut pairs = 0usize;
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            pairs += 1;
            sums[0] += distance::euclidean(&cs[i], &cs[j]);
            sums[1] += distance::minkowski(&cs[i], &cs[j], 3.0);
            sums[2] += distance::manhattan(&cs[i], &cs[j]);
            sums[3] += distance::sign_hamming(&cs[i], &cs[j]);
            cos_sum = match (cos_sum, distance::cosine(&cs[i], &cs[j])) {
                (Some(acc), Some(d)) => Some(acc + d),
                _ => None,
            };
        }
    }
    let p = pairs as f64;
    Ok(CentroidDistances {
        cosine: cos_sum.map(|s| s / p),
        euclidean: sums[0] / p,
        minkowski_p3: sums[1] / p,
        manhattan: sums[2] / p,
        hamming: sums[3] / p,
    })
}
