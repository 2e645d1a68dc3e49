use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric feature matrix with one class label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    /// Class indices in `0..classes`.
    pub labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, features: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::InvalidDataset("rows have no features".into()));
        }
        if let Some(i) = features.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidDataset(format!("row {i} has inconsistent width")));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite feature value".into()));
        }
        Ok(LabeledDataset {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Number of distinct classes present.
    pub fn classes(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }

    /// Per-label instance counts, indexed by label value.
    pub fn class_counts(&self) -> Vec<usize> {
        let max = self.labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0; max];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Per-dimension `(min, max)` of the features.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim()];
        for row in &self.features {
            for (bound, &v) in b.iter_mut().zip(row) {
                bound.0 = bound.0.min(v);
                bound.1 = bound.1.max(v);
            }
        }
        b
    }

    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            name: name.into(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Isotropic unit-variance Gaussian blobs with balanced labels (class sizes
/// differ by at most one). Centres are placed at mutual distance of at least
/// `separation`; a separation of 0 puts every centre at the origin.
pub fn generate_blobs<R: Rng + ?Sized>(
    n: usize,
    k_true: usize,
    d: usize,
    separation: f64,
    rng: &mut R,
) -> Result<LabeledDataset> {
    if k_true == 0 || n < k_true || d == 0 {
        return Err(Error::InvalidConfig(format!(
            "blobs need n >= k >= 1 and d >= 1 (n = {n}, k = {k_true}, d = {d})"
        )));
    }
    let centers = place_centers(k_true, d, separation, rng);
    let mut rows = Vec::with_capacity(n);
    for class in 0..k_true {
        let size = n / k_true + usize::from(class < n % k_true);
        for _ in 0..size {
            let x: Vec<f64> = centers[class]
                .iter()
                .map(|c| c + rng.sample::<f64, _>(StandardNormal))
                .collect();
            rows.push((x, class));
        }
    }
    rows.shuffle(rng);
    let (features, labels) = rows.into_iter().unzip();
    LabeledDataset::new(
        format!("blobs-n{n}-k{k_true}-d{d}-sep{separation}"),
        features,
        labels,
    )
}

fn place_centers<R: Rng + ?Sized>(k: usize, d: usize, sep: f64, rng: &mut R) -> Vec<Vec<f64>> {
    if sep <= 0.0 {
        return vec![vec![0.0; d]; k];
    }
    let mut half_width = sep * k as f64;
    loop {
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        for _ in 0..10_000 {
            if centers.len() == k {
                break;
            }
            let c: Vec<f64> = (0..d).map(|_| rng.random_range(-half_width..half_width)).collect();
            if centers.iter().all(|o| crate::distance::euclidean(o, &c) >= sep) {
                centers.push(c);
            }
        }
        if centers.len() == k {
            return centers;
        }
        half_width *= 2.0;
    }
}

/// Split into two folds with per-class counts differing by at most one.
/// The larger half of each class goes to the first fold.
pub fn stratified_two_folds<R: Rng + ?Sized>(
    dataset: &LabeledDataset,
    rng: &mut R,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in dataset.labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (class, mut idx) in by_class {
        if idx.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "class {class} has a single instance and cannot be stratified"
            )));
        }
        idx.shuffle(rng);
        let cut = idx.len().div_ceil(2);
        first.extend_from_slice(&idx[..cut]);
        second.extend_from_slice(&idx[cut..]);
    }
    first.sort_unstable();
    second.sort_unstable();
    Ok((
        dataset.subset(format!("{}-fold1", dataset.name), &first),
        dataset.subset(format!("{}-fold2", dataset.name), &second),
    ))
}

/// Read a dataset whose last column is the class label and whose other
/// columns are numeric features. Labels are mapped to class indices in
/// sorted label order.
pub fn load_csv(path: &Path, has_header: bool) -> Result<LabeledDataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() < 2 {
            return Err(parse_err(line, "expected at least one feature and a label".into()));
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_err(line, format!("expected {w} columns, found {}", record.len())))
            }
            _ => {}
        }
        let row = record
            .iter()
            .take(record.len() - 1)
            .enumerate()
            .map(|(col, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("column {}: `{field}` is not numeric", col + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        features.push(row);
        raw_labels.push(record[record.len() - 1].to_owned());
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut names: Vec<&String> = raw_labels.iter().collect();
    names.sort();
    names.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| names.binary_search(&l).unwrap())
        .collect();
    let name = path
        .file_stem()
        .map_or_else(|| "csv".to_owned(), |s| s.to_string_lossy().into_owned());
    LabeledDataset::new(name, features, labels)
}
