use serde::{Deserialize, Serialize};

/// Distance measures available to the clustering algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Manhattan,
    Cosine,
    MinkowskiP3,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Euclidean,
        Metric::Manhattan,
        Metric::Cosine,
        Metric::MinkowskiP3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Cosine => "cosine",
            Metric::MinkowskiP3 => "minkowski_p3",
        }
    }

    /// Distance between `a` and `b`. Cosine distance against a zero vector
    /// is taken as 1 (orthogonal).
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => euclidean(a, b),
            Metric::Manhattan => manhattan(a, b),
            Metric::Cosine => cosine(a, b).unwrap_or(1.0),
            Metric::MinkowskiP3 => minkowski(a, b, 3.0),
        }
    }
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

pub fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn minkowski(a: &[f64], b: &[f64], p: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `1 - cos(a, b)`; `None` when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        None
    } else {
        Some((1.0 - dot / (na * nb)).max(0.0))
    }
}

/// Fraction of coordinates whose signs (`x > 0`) differ.
pub fn sign_hamming(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let diff = a.iter().zip(b).filter(|(x, y)| (**x > 0.0) != (**y > 0.0)).count();
    diff as f64 / a.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(euclidean(&a, &b), 5.0);
        assert_eq!(manhattan(&a, &b), 7.0);
        assert!((minkowski(&a, &b, 3.0) - 91f64.cbrt()).abs() < 1e-12);
        assert_eq!(cosine(&a, &b), None);
        assert_eq!(Metric::Cosine.distance(&a, &b), 1.0);
    }

    #[test]
    fn cosine_scale_invariant() {
        let a = [1.0, 2.0, -1.0];
        let b = [0.5, -1.0, 3.0];
        let a2: Vec<f64> = a.iter().map(|x| x * 2.0).collect();
        let b2: Vec<f64> = b.iter().map(|x| x * 2.0).collect();
        assert!((cosine(&a, &b).unwrap() - cosine(&a2, &b2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hamming_on_signs() {
        assert_eq!(sign_hamming(&[1.0, -1.0, 0.5, 0.0], &[2.0, 1.0, -0.5, 0.0]), 0.5);
    }
}
