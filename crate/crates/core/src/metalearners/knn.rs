use serde::{Deserialize, Serialize};

use crate::distance::squared_euclidean;

/// Row store of z-scored training features. Constant columns get unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl KnnModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], k: usize) -> Self {
        let n = x.len() as f64;
        let width = x.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; width];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; width];
        for row in x {
            for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut scale {
            *s = s.sqrt();
            if *s <= 1e-12 || !s.is_finite() {
                *s = 1.0;
            }
        }
        let mut model = KnnModel {
            k: k.max(1),
            mean,
            scale,
            rows: Vec::new(),
            targets: y.to_vec(),
        };
        model.rows = x.iter().map(|r| model.normalise(r)).collect();
        model
    }

    pub fn normalise(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    /// Indices of the `k` nearest rows ordered by (distance, index).
    pub fn neighbours(&self, query: &[f64]) -> Vec<usize> {
        let q = self.normalise(query);
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (squared_euclidean(&q, r), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict_mean(&self, query: &[f64]) -> f64 {
        let nb = self.neighbours(query);
        nb.iter().map(|&i| self.targets[i]).sum::<f64>() / nb.len() as f64
    }

    /// Most frequent target among the neighbours; ties go to the class of the
    /// nearest tied neighbour.
    pub fn predict_vote(&self, query: &[f64]) -> f64 {
        let nb = self.neighbours(query);
        let count = |c: f64| nb.iter().filter(|&&i| self.targets[i] == c).count();
        let mut best = self.targets[nb[0]];
        let mut best_count = count(best);
        for &i in &nb[1..] {
            let c = self.targets[i];
            let n = count(c);
            if n > best_count {
                best = c;
                best_count = n;
            }
        }
        best
    }
}
