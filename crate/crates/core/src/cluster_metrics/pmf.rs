//! Discrete-distribution features of the cluster-size distribution.
//!
//! Each family is fitted to the occupied cluster sizes by the method of
//! moments and its PMF is evaluated at the modal cluster size. Bernoulli
//! models membership of the largest cluster.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PmfFeatures {
    pub bernoulli: Option<f64>,
    pub laplacian: Option<f64>,
    pub zeta: Option<f64>,
    pub poisson: Option<f64>,
    pub planck: Option<f64>,
    pub logarithmic_series: Option<f64>,
    pub yule_simon: Option<f64>,
}

impl PmfFeatures {
    pub fn values(&self) -> [Option<f64>; 7] {
        [
            self.bernoulli,
            self.laplacian,
            self.zeta,
            self.poisson,
            self.planck,
            self.logarithmic_series,
            self.yule_simon,
        ]
    }
}

/// PMF features for the predicted labels. Fewer than two occupied clusters
/// give all-undefined output.
pub fn pmf_features(pred: &[usize]) -> PmfFeatures {
    let n = pred.len();
    if n == 0 {
        return PmfFeatures::default();
    }
    let max_label = *pred.iter().max().unwrap();
    let mut counts = vec![0u64; max_label + 1];
    for &p in pred {
        counts[p] += 1;
    }
    let sizes: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    if sizes.len() < 2 {
        return PmfFeatures::default();
    }

    let k = sizes.len() as f64;
    let mean = sizes.iter().sum::<u64>() as f64 / k;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / k;
    let mode = modal_size(&sizes);
    let x = mode as f64;

    let largest = *sizes.iter().max().unwrap() as f64 / n as f64;

    PmfFeatures {
        bernoulli: Some(largest),
        laplacian: Some(dlaplace_pmf(mode as i64 - mean.round() as i64, var)),
        zeta: Some(zipf_pmf(mode, zipf_exponent(mean))),
        poisson: Some((x * mean.ln() - mean - ln_gamma(x + 1.0)).exp()),
        planck: Some(planck_pmf(mode, mean)),
        logarithmic_series: Some(logser_pmf(mode, logser_p(mean))),
        yule_simon: Some(yule_simon_pmf(mode, mean)),
    }
}

/// Most frequent size value; ties go to the smallest.
fn modal_size(sizes: &[u64]) -> u64 {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let (mut best, mut best_run) = (sorted[0], 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&s| s == sorted[i]).count();
        if j > best_run {
            best = sorted[i];
            best_run = j;
        }
        i += j;
    }
    best
}

/// Discrete Laplacian `tanh(a/2) exp(-a|k|)` with `a` matched to `var`.
fn dlaplace_pmf(k: i64, var: f64) -> f64 {
    if var <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // var = 2q / (1 - q)^2 with q = exp(-a)
    let q = ((var + 1.0) - (2.0 * var + 1.0).sqrt()) / var;
    let a = -q.ln();
    (a / 2.0).tanh() * (-a * k.unsigned_abs() as f64).exp()
}

/// Riemann zeta for `s > 1` by Euler-Maclaurin summation.
pub(crate) fn riemann_zeta(s: f64) -> f64 {
    const N: u32 = 20;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
}

/// Zipf exponent whose mean `zeta(a-1)/zeta(a)` equals `mean`.
fn zipf_exponent(mean: f64) -> f64 {
    let (mut lo, mut hi) = (2.0 + 1e-6, 60.0);
    let mean_at = |a: f64| riemann_zeta(a - 1.0) / riemann_zeta(a);
    if mean >= mean_at(lo) {
        return lo;
    }
    if mean <= mean_at(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) > mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn zipf_pmf(k: u64, a: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (k as f64).powf(-a) / riemann_zeta(a)
}

/// Planck (geometric on 0, 1, ...) with mean `1 / (e^l - 1)`.
fn planck_pmf(k: u64, mean: f64) -> f64 {
    let l = (1.0 + 1.0 / mean).ln();
    (1.0 - (-l).exp()) * (-l * k as f64).exp()
}

/// Logarithmic-series parameter whose mean `-p / ((1-p) ln(1-p))`
/// equals `mean`.
fn logser_p(mean: f64) -> f64 {
    let mean_at = |p: f64| -p / ((1.0 - p) * (1.0 - p).ln());
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    if mean <= mean_at(lo) {
        return lo;
    }
    if mean >= mean_at(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn logser_pmf(k: u64, p: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    -(k * p.ln()).exp() / (k * (1.0 - p).ln())
}

/// Yule-Simon `rho B(k, rho + 1)` with `rho = mean / (mean - 1)`.
fn yule_simon_pmf(k: u64, mean: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if mean <= 1.0 {
        // rho -> infinity puts all mass on k = 1
        return if k == 1 { 1.0 } else { 0.0 };
    }
    let rho = mean / (mean - 1.0);
    let k = k as f64;
    let ln_beta = ln_gamma(k) + ln_gamma(rho + 1.0) - ln_gamma(k + rho + 1.0);
    rho * ln_beta.exp()
}
