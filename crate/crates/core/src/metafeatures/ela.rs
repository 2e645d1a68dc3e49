//! Exploratory landscape analysis over a sampled landscape `(xs, ys)`:
//! y-distribution, meta-model, dispersion, information content and
//! nearest-better clustering features.
//!
//! Objective values are accuracies, so "better" always means larger.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::distance::euclidean;
use crate::error::{Error, Result};

/// Sampled landscape: `xs[i]` was evaluated to `ys[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSample {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LandscapeSample {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InsufficientSamples(format!(
                "{} points but {} objective values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientSamples(
                "a landscape needs at least two points".into(),
            ));
        }
        if xs.iter().any(|x| x.len() != bounds.len()) {
            return Err(Error::InsufficientSamples("point dimension mismatch".into()));
        }
        Ok(LandscapeSample { xs, ys, bounds })
    }

    /// Sample whose bounds are the per-dimension extent of `xs`.
    pub fn from_points(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> Self {
        let dim = xs.first().map_or(0, Vec::len);
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        for x in &xs {
            for (b, v) in bounds.iter_mut().zip(x) {
                b.0 = b.0.min(*v);
                b.1 = b.1.max(*v);
            }
        }
        LandscapeSample { xs, ys, bounds }
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&y| y == v[0])
}

/// Type-7 (linear interpolation) quantile of unsorted data.
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let h = (s.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

// ---------------------------------------------------------------- y-distribution

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YDistribution {
    pub skewness: f64,
    /// Excess kurtosis.
    pub kurtosis: f64,
    pub n_peaks: usize,
}

/// Moment skewness and excess kurtosis of `ys`, and the number of modes of a
/// Gaussian KDE (Silverman bandwidth, 512-point grid). Constant `ys` give
/// `(0, 0, 1)`.
pub fn ela_y_distribution(sample: &LandscapeSample) -> Result<YDistribution> {
    let ys = &sample.ys;
    if ys.len() < 3 {
        return Err(Error::InsufficientSamples("y-distribution needs n >= 3".into()));
    }
    if is_constant(ys) {
        return Ok(YDistribution {
            skewness: 0.0,
            kurtosis: 0.0,
            n_peaks: 1,
        });
    }
    let n = ys.len() as f64;
    let m = mean(ys);
    let m2 = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / n;
    let m3 = ys.iter().map(|y| (y - m).powi(3)).sum::<f64>() / n;
    let m4 = ys.iter().map(|y| (y - m).powi(4)).sum::<f64>() / n;
    Ok(YDistribution {
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2) - 3.0,
        n_peaks: kde_peaks(ys),
    })
}

pub(crate) fn silverman_bandwidth(ys: &[f64]) -> f64 {
    let sd = sample_sd(ys);
    let iqr = quantile(ys, 0.75) - quantile(ys, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (ys.len() as f64).powf(-0.2)
}

fn kde_peaks(ys: &[f64]) -> usize {
    const GRID: usize = 512;
    let h = silverman_bandwidth(ys);
    if h <= 0.0 {
        return 1;
    }
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (GRID - 1) as f64;
    let density: Vec<f64> = (0..GRID)
        .map(|g| {
            let x = lo + g as f64 * step;
            ys.iter().map(|y| (-0.5 * ((x - y) / h).powi(2)).exp()).sum()
        })
        .collect();
    // a peak is a rise followed by a fall, with plateaus allowed in between
    let mut peaks = 0;
    let mut rising = false;
    for w in density.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] {
            if rising {
                peaks += 1;
            }
            rising = false;
        }
    }
    peaks.max(1)
}

// ---------------------------------------------------------------- meta-model

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaModel {
    pub r2_lin_adj: Option<f64>,
    pub lin_coef_min: Option<f64>,
    pub lin_coef_max: Option<f64>,
    pub r2_quad_adj: Option<f64>,
    pub quad_coef_min: Option<f64>,
    pub quad_coef_max: Option<f64>,
    /// Set when either design matrix was rank deficient and the coefficients
    /// are the minimum-norm least-squares solution.
    pub rank_deficient: bool,
}

struct Fit {
    r2_adj: Option<f64>,
    coef_min: Option<f64>,
    coef_max: Option<f64>,
    rank_deficient: bool,
}

fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Fit {
    let n = rows.len();
    let cols = rows[0].len();
    let x = DMatrix::from_fn(n, cols, |i, j| rows[i][j]);
    let y = DVector::from_column_slice(ys);
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * n.max(cols) as f64;
    let rank = svd.rank(eps);
    let beta = svd.solve(&y, eps).expect("U and V were computed");

    let predictors = cols - 1;
    let y_mean = mean(ys);
    let sst: f64 = ys.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r2_adj = if sst == 0.0 {
        Some(0.0)
    } else {
        let resid = &y - &x * &beta;
        let r2 = 1.0 - resid.norm_squared() / sst;
        let dof = n as f64 - predictors as f64 - 1.0;
        (dof > 0.0).then(|| 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof)
    };
    let coefs = beta.iter().skip(1);
    Fit {
        r2_adj,
        coef_min: coefs.clone().copied().reduce(f64::min),
        coef_max: coefs.copied().reduce(f64::max),
        rank_deficient: rank < cols,
    }
}

/// Linear and quadratic (squared terms, no interactions) least-squares
/// models of `ys` on `xs`, reporting adjusted R² and the extreme
/// non-intercept coefficients. Adjusted R² is undefined when the model has
/// no residual degrees of freedom; constant `ys` give an adjusted R² of 0.
pub fn ela_meta_model(sample: &LandscapeSample) -> Result<MetaModel> {
    if sample.len() < 2 {
        return Err(Error::InsufficientSamples("meta-model needs n >= 2".into()));
    }
    let lin_rows: Vec<Vec<f64>> = sample
        .xs
        .iter()
        .map(|x| std::iter::once(1.0).chain(x.iter().copied()).collect())
        .collect();
    let quad_rows: Vec<Vec<f64>> = sample
        .xs
        .iter()
        .map(|x| {
            std::iter::once(1.0)
                .chain(x.iter().copied())
                .chain(x.iter().map(|v| v * v))
                .collect()
        })
        .collect();
    let lin = least_squares(&lin_rows, &sample.ys);
    let quad = least_squares(&quad_rows, &sample.ys);
    Ok(MetaModel {
        r2_lin_adj: lin.r2_adj,
        lin_coef_min: lin.coef_min,
        lin_coef_max: lin.coef_max,
        r2_quad_adj: quad.r2_adj,
        quad_coef_min: quad.coef_min,
        quad_coef_max: quad.coef_max,
        rank_deficient: lin.rank_deficient || quad.rank_deficient,
    })
}

// ---------------------------------------------------------------- dispersion

pub const DISPERSION_QUANTILES: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    /// Mean pairwise distance of the best-`q` subset over that of all points,
    /// per entry of [`DISPERSION_QUANTILES`].
    pub ratio: [Option<f64>; 4],
    /// Same two means, subtracted.
    pub diff: [Option<f64>; 4],
}

fn mean_pairwise(points: &[&Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            sum += euclidean(points[i], points[j]);
            count += 1;
        }
    }
    sum / count as f64
}

pub fn ela_dispersion(sample: &LandscapeSample) -> Result<Dispersion> {
    if sample.len() < 2 {
        return Err(Error::InsufficientSamples("dispersion needs n >= 2".into()));
    }
    let all: Vec<&Vec<f64>> = sample.xs.iter().collect();
    let d_all = mean_pairwise(&all);
    let mut out = Dispersion {
        ratio: [None; 4],
        diff: [None; 4],
    };
    for (slot, &q) in DISPERSION_QUANTILES.iter().enumerate() {
        let threshold = quantile(&sample.ys, 1.0 - q);
        let best: Vec<&Vec<f64>> = sample
            .xs
            .iter()
            .zip(&sample.ys)
            .filter(|(_, &y)| y >= threshold)
            .map(|(x, _)| x)
            .collect();
        if best.len() < 2 {
            continue;
        }
        let d_best = mean_pairwise(&best);
        out.ratio[slot] = Some(if d_all == 0.0 { 1.0 } else { d_best / d_all });
        out.diff[slot] = Some(d_best - d_all);
    }
    Ok(out)
}

// ---------------------------------------------------------------- information content

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationContent {
    pub h_max: f64,
    /// log10 of the smallest ε whose symbol sequence is all zeros.
    pub settling_sensitivity: Option<f64>,
    /// log10 of the ε at which the entropy peaks.
    pub eps_s: Option<f64>,
    /// log10 of the largest ε keeping the partial information above half
    /// of its ε = 0 value.
    pub m0_ratio: Option<f64>,
    /// Partial information at ε = 0.
    pub initial_partial_information: f64,
}

pub const IC_GRID_POINTS: usize = 32;
pub const IC_GRID_MIN: f64 = 1e-6;

/// Order the sample by a greedy nearest-neighbour tour from the first point.
pub fn nearest_neighbour_tour(xs: &[Vec<f64>]) -> Vec<usize> {
    let n = xs.len();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut cur = 0;
    visited[0] = true;
    tour.push(0);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..n {
            if !visited[j] {
                let d = euclidean(&xs[cur], &xs[j]);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        visited[best] = true;
        tour.push(best);
        cur = best;
    }
    tour
}

/// Symbols over {-1, 0, +1} for successive differences under tolerance `eps`.
pub fn symbols(diffs: &[f64], eps: f64) -> Vec<i8> {
    diffs
        .iter()
        .map(|&d| {
            if d > eps {
                1
            } else if d < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Base-6 entropy of consecutive unequal symbol pairs.
pub fn block_entropy(sym: &[i8]) -> f64 {
    if sym.len() < 2 {
        return 0.0;
    }
    let total = (sym.len() - 1) as f64;
    let mut counts = [[0usize; 3]; 3];
    for w in sym.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / total;
                h -= p * p.log(6.0);
            }
        }
    }
    h
}

/// Length of the sequence left after dropping zeros and collapsing runs,
/// relative to the sequence length.
pub fn partial_information(sym: &[i8]) -> f64 {
    if sym.is_empty() {
        return 0.0;
    }
    let mut mu = 0usize;
    let mut last = 0i8;
    for &s in sym {
        if s != 0 && s != last {
            mu += 1;
            last = s;
        }
    }
    mu as f64 / sym.len() as f64
}

/// Successive objective differences along the nearest-neighbour tour.
pub fn tour_differences(sample: &LandscapeSample) -> Vec<f64> {
    let tour = nearest_neighbour_tour(&sample.xs);
    tour.windows(2)
        .map(|w| sample.ys[w[1]] - sample.ys[w[0]])
        .collect()
}

pub fn ela_information_content(sample: &LandscapeSample) -> Result<InformationContent> {
    if sample.len() < 3 {
        return Err(Error::InsufficientSamples(
            "information content needs n >= 3".into(),
        ));
    }
    let diffs = tour_differences(sample);
    let sym0 = symbols(&diffs, 0.0);
    let h0 = block_entropy(&sym0);
    let m0 = partial_information(&sym0);

    let lo = sample.ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sample.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range <= IC_GRID_MIN {
        return Ok(InformationContent {
            h_max: h0,
            settling_sensitivity: None,
            eps_s: None,
            m0_ratio: None,
            initial_partial_information: m0,
        });
    }

    let (a, b) = (IC_GRID_MIN.log10(), range.log10());
    let mut grid: Vec<f64> = (0..IC_GRID_POINTS)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (IC_GRID_POINTS - 1) as f64))
        .collect();
    // pin the top of the grid to the range so it always settles
    grid[IC_GRID_POINTS - 1] = range;

    let mut h_max = h0;
    let mut eps_at_max = None;
    let mut settling = None;
    let mut half_info = None;
    for &eps in &grid {
        let sym = symbols(&diffs, eps);
        let h = block_entropy(&sym);
        if h > h_max {
            h_max = h;
            eps_at_max = Some(eps);
        }
        if settling.is_none() && sym.iter().all(|&s| s == 0) {
            settling = Some(eps);
        }
        if m0 > 0.0 && partial_information(&sym) > 0.5 * m0 {
            half_info = Some(eps);
        }
    }
    // entropy peaking at ε = 0 is reported at the bottom of the grid
    let eps_s = eps_at_max.or(Some(grid[0]));
    Ok(InformationContent {
        h_max,
        settling_sensitivity: settling.map(f64::log10),
        eps_s: eps_s.map(f64::log10),
        m0_ratio: half_info.map(f64::log10),
        initial_partial_information: m0,
    })
}

// ---------------------------------------------------------------- NBC

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Nbc {
    /// sd(nearest-better) / sd(nearest)
    pub sd_ratio: Option<f64>,
    /// mean(nearest-better) / mean(nearest)
    pub mean_ratio: Option<f64>,
    /// Pearson correlation of nearest and nearest-better distances.
    pub dist_correlation: Option<f64>,
    /// Coefficient of variation of nearest / nearest-better ratios.
    pub cv_ratio: Option<f64>,
    /// Coefficient of variation of nearest-better in-degrees.
    pub indegree_cv: Option<f64>,
}

/// Nearest and nearest-better distances plus the nearest-better index of
/// every point. The best point has no better neighbour; its distance is the
/// largest pairwise distance and its index is `None`.
pub fn nearest_better(sample: &LandscapeSample) -> (Vec<f64>, Vec<f64>, Vec<Option<usize>>) {
    let n = sample.len();
    let mut dist = vec![vec![0.0; n]; n];
    let mut max_pair = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(&sample.xs[i], &sample.xs[j]);
            dist[i][j] = d;
            dist[j][i] = d;
            max_pair = max_pair.max(d);
        }
    }
    let mut nn = vec![f64::INFINITY; n];
    let mut nb = vec![f64::INFINITY; n];
    let mut nb_idx = vec![None; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            nn[i] = nn[i].min(dist[i][j]);
            if sample.ys[j] > sample.ys[i] && dist[i][j] < nb[i] {
                nb[i] = dist[i][j];
                nb_idx[i] = Some(j);
            }
        }
        if nb_idx[i].is_none() {
            nb[i] = max_pair;
        }
    }
    (nn, nb, nb_idx)
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b != 0.0 && (a / b).is_finite()).then(|| a / b)
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    let denom = (va * vb).sqrt();
    (denom > 0.0).then(|| cov / denom)
}

/// Nearest-better clustering features; all undefined for constant `ys`.
pub fn ela_nbc(sample: &LandscapeSample) -> Result<Nbc> {
    if sample.len() < 3 {
        return Err(Error::InsufficientSamples("NBC needs n >= 3".into()));
    }
    if is_constant(&sample.ys) {
        return Ok(Nbc::default());
    }
    let (nn, nb, nb_idx) = nearest_better(sample);
    let ratios: Vec<f64> = nn
        .iter()
        .zip(&nb)
        .map(|(a, b)| if *b > 0.0 { a / b } else { 1.0 })
        .collect();
    let mut indegree = vec![0.0; sample.len()];
    for j in nb_idx.iter().flatten() {
        indegree[*j] += 1.0;
    }
    Ok(Nbc {
        sd_ratio: ratio(sample_sd(&nb), sample_sd(&nn)),
        mean_ratio: ratio(mean(&nb), mean(&nn)),
        dist_correlation: pearson(&nn, &nb),
        cv_ratio: ratio(sample_sd(&ratios), mean(&ratios)),
        indegree_cv: ratio(sample_sd(&indegree), mean(&indegree)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(ys: &[f64]) -> LandscapeSample {
        LandscapeSample::from_points((0..ys.len()).map(|i| vec![i as f64]).collect(), ys.to_vec())
    }

    #[test]
    fn symmetric_y_has_zero_skew() {
        let yd = ela_y_distribution(&line(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        assert!(yd.skewness.abs() < 1e-12);
        // uniform five-point: m4/m2^2 = 6.8/4 = 1.7
        assert!((yd.kurtosis - (1.7 - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_y_convention() {
        let yd = ela_y_distribution(&line(&[0.4; 6])).unwrap();
        assert_eq!((yd.skewness, yd.kurtosis, yd.n_peaks), (0.0, 0.0, 1));
    }

    /// Independent mode count: evaluate the KDE on a dense grid and count
    /// sign changes of its finite-difference derivative from + to -.
    fn dense_kde_modes(ys: &[f64], h: f64) -> usize {
        let lo = -1.0;
        let hi = 2.0;
        let n = 30_000;
        let f = |x: f64| -> f64 { ys.iter().map(|y| (-0.5 * ((x - y) / h).powi(2)).exp()).sum() };
        let mut modes = 0;
        let mut prev = f(lo);
        let mut up = false;
        for i in 1..=n {
            let cur = f(lo + (hi - lo) * i as f64 / n as f64);
            if cur > prev {
                up = true;
            } else if cur < prev && up {
                modes += 1;
                up = false;
            }
            prev = cur;
        }
        modes
    }

    #[test]
    fn two_clumps_have_two_peaks() {
        let ys = [0.0, 0.01, 0.02, 1.0, 1.01, 1.02];
        let h = silverman_bandwidth(&ys);
        assert_eq!(dense_kde_modes(&ys, h), 2);
        assert_eq!(ela_y_distribution(&line(&ys)).unwrap().n_peaks, 2);
    }

    #[test]
    fn skewness_shift_and_sign() {
        let ys = [0.1, 0.2, 0.25, 0.9, 0.3, 0.05];
        let base = ela_y_distribution(&line(&ys)).unwrap().skewness;
        let shifted: Vec<f64> = ys.iter().map(|y| y + 3.0).collect();
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        assert!((ela_y_distribution(&line(&shifted)).unwrap().skewness - base).abs() < 1e-9);
        assert!((ela_y_distribution(&line(&neg)).unwrap().skewness + base).abs() < 1e-12);
    }

    #[test]
    fn exact_linear_model() {
        let xs: Vec<Vec<f64>> = [0.3, 1.2, 2.0, -0.7, 5.0, 3.3].iter().map(|&x| vec![x]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0]).collect();
        let mm = ela_meta_model(&LandscapeSample::from_points(xs, ys)).unwrap();
        assert!((mm.r2_lin_adj.unwrap() - 1.0).abs() < 1e-9);
        assert!((mm.lin_coef_min.unwrap() - 2.0).abs() < 1e-9);
        assert!((mm.lin_coef_max.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_y_meta_model() {
        let mm = ela_meta_model(&line(&[0.5; 5])).unwrap();
        assert_eq!(mm.r2_lin_adj, Some(0.0));
    }

    #[test]
    fn parabola_meta_model() {
        // x in {-2..2}, y = x^2: the linear fit has slope 0 and R² = 0, so
        // adjusted R² = 1 - (1 - 0)(5 - 1)/(5 - 1 - 1) = -1/3; the quadratic
        // fit is exact
        let xs: Vec<Vec<f64>> = (-2..=2).map(|x| vec![x as f64]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0] * x[0]).collect();
        let mm = ela_meta_model(&LandscapeSample::from_points(xs, ys)).unwrap();
        assert!((mm.r2_quad_adj.unwrap() - 1.0).abs() < 1e-9);
        assert!((mm.r2_lin_adj.unwrap() + 1.0 / 3.0).abs() < 1e-9);
        assert!(mm.lin_coef_max.unwrap().abs() < 1e-9);
    }

    #[test]
    fn linear_coefficients_scale_with_y() {
        let xs: Vec<Vec<f64>> = vec![
            vec![0.1, 0.9],
            vec![0.5, 0.2],
            vec![0.8, 0.4],
            vec![0.3, 0.3],
            vec![0.9, 0.8],
            vec![0.2, 0.6],
        ];
        let ys = vec![0.3, 0.9, 0.1, 0.5, 0.7, 0.2];
        let a = ela_meta_model(&LandscapeSample::from_points(xs.clone(), ys.clone())).unwrap();
        let ys3: Vec<f64> = ys.iter().map(|y| 3.0 * y).collect();
        let b = ela_meta_model(&LandscapeSample::from_points(xs, ys3)).unwrap();
        assert!((b.lin_coef_min.unwrap() - 3.0 * a.lin_coef_min.unwrap()).abs() < 1e-9);
        assert!((b.lin_coef_max.unwrap() - 3.0 * a.lin_coef_max.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn underdetermined_quadratic_is_flagged() {
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, (i * i) as f64 * 0.1, 1.0]).collect();
        let ys = vec![0.1, 0.5, 0.2, 0.9, 0.4];
        let mm = ela_meta_model(&LandscapeSample::from_points(xs, ys)).unwrap();
        assert!(mm.rank_deficient);
        assert_eq!(mm.r2_quad_adj, None);
        assert!(mm.quad_coef_min.unwrap().is_finite());
    }

    #[test]
    fn dispersion_identical_points() {
        let s = LandscapeSample::from_points(vec![vec![1.0, 1.0]; 10], (0..10).map(|i| i as f64 / 10.0).collect());
        let d = ela_dispersion(&s).unwrap();
        assert_eq!(d.ratio[3], Some(1.0));
        assert_eq!(d.diff[3], Some(0.0));
    }

    #[test]
    fn dispersion_constant_y_is_identity() {
        let xs: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let d = ela_dispersion(&LandscapeSample::from_points(xs, vec![0.7; 12])).unwrap();
        for q in 0..4 {
            assert_eq!(d.ratio[q], Some(1.0));
            assert_eq!(d.diff[q], Some(0.0));
        }
    }

    #[test]
    fn dispersion_clustered_best_points() {
        // five best points (y = 1) share one location; fifteen worse points
        // lie on a spread-out ring
        let mut xs = vec![vec![0.0, 0.0]; 5];
        let mut ys = vec![1.0; 5];
        for i in 0..15 {
            let a = i as f64 * std::f64::consts::TAU / 15.0;
            xs.push(vec![10.0 * a.cos(), 10.0 * a.sin()]);
            ys.push(0.1 + 0.01 * i as f64);
        }
        let d = ela_dispersion(&LandscapeSample::from_points(xs, ys)).unwrap();
        for q in 0..4 {
            assert_eq!(d.ratio[q], Some(0.0));
            assert!(d.diff[q].unwrap() < 0.0);
        }
    }

    #[test]
    fn dispersion_small_subset_sentinel() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let d = ela_dispersion(&LandscapeSample::from_points(xs, ys)).unwrap();
        // top 2% of 20 distinct values is a single point
        assert_eq!(d.ratio[0], None);
        assert!(d.ratio[3].is_some());
    }

    #[test]
    fn increasing_y_has_zero_entropy() {
        let sym = symbols(&tour_differences(&line(&[0.1, 0.2, 0.4, 0.45, 0.9])), 0.0);
        assert_eq!(sym, vec![1, 1, 1, 1]);
        assert_eq!(block_entropy(&sym), 0.0);
        // equal increments stay single-symbol at every ε
        let ic = ela_information_content(&line(&[0.0, 0.25, 0.5, 0.75, 1.0])).unwrap();
        assert_eq!(ic.h_max, 0.0);
    }

    #[test]
    fn constant_y_has_zero_information() {
        let ic = ela_information_content(&line(&[0.3; 8])).unwrap();
        assert_eq!(ic.h_max, 0.0);
        assert_eq!(ic.initial_partial_information, 0.0);
    }

    #[test]
    fn alternating_y_entropy_by_enumeration() {
        // tour visits x = 0..5 in order; symbols +,-,+,-,+; the four
        // consecutive pairs are (+-), (-+), (+-), (-+): two classes with
        // probability 1/2 each, H = log6(2)
        let ys = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let s = line(&ys);
        let sym = symbols(&tour_differences(&s), 0.5);
        assert_eq!(sym, vec![1, -1, 1, -1, 1]);
        assert!((block_entropy(&sym) - 2f64.ln() / 6f64.ln()).abs() < 1e-12);
        let ic = ela_information_content(&s).unwrap();
        assert!((ic.h_max - 2f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert_eq!(ic.initial_partial_information, 1.0);
        // all-zero symbols first appear at the top of the grid (ε = range = 1)
        assert!(ic.settling_sensitivity.unwrap().abs() < 1e-12);
    }

    #[test]
    fn nbc_three_point_example() {
        let s = LandscapeSample::from_points(vec![vec![0.0], vec![1.0], vec![2.0]], vec![0.1, 0.2, 0.3]);
        let (nn, nb, _) = nearest_better(&s);
        assert_eq!(nn, vec![1.0, 1.0, 1.0]);
        assert_eq!(nb, vec![1.0, 1.0, 2.0]);
        let f = ela_nbc(&s).unwrap();
        assert!((f.mean_ratio.unwrap() - 4.0 / 3.0).abs() < 1e-12);
        // sd of the nearest distances is zero
        assert_eq!(f.sd_ratio, None);
        assert_eq!(f.dist_correlation, None);
    }

    #[test]
    fn nbc_simplex_equidistant() {
        let s = LandscapeSample::from_points(
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![0.2, 0.5, 0.9],
        );
        let (nn, _, _) = nearest_better(&s);
        assert!(nn.iter().all(|d| (d - 2f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn nbc_constant_y_sentinel() {
        assert_eq!(ela_nbc(&line(&[0.5; 5])).unwrap(), Nbc::default());
    }
}
