use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, Node, Task, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 100,
            learning_rate: 0.1,
            max_depth: 3,
        }
    }
}

/// Squared-loss gradient boosting from a mean base score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbt {
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<Node>,
}

impl Gbt {
    pub fn fit<R: Rng + ?Sized>(x: &[Vec<f64>], y: &[f64], params: &GbtParams, rng: &mut R) -> Self {
        let n = y.len();
        let base = y.iter().sum::<f64>() / n as f64;
        let all: Vec<usize> = (0..n).collect();
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            max_features: None,
            task: Task::Regression,
        };
        let mut current = vec![base; n];
        let mut trees = Vec::with_capacity(params.rounds);
        for _ in 0..params.rounds {
            let residual: Vec<f64> = y.iter().zip(&current).map(|(t, f)| t - f).collect();
            let tree = fit_tree(x, &residual, &all, tree_params, rng);
            for (f, row) in current.iter_mut().zip(x) {
                *f += params.learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }
        Gbt {
            base,
            learning_rate: params.learning_rate,
            trees,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predict_rounds(x, self.trees.len())
    }

    /// Prediction using only the first `rounds` trees.
    pub fn predict_rounds(&self, x: &[f64], rounds: usize) -> f64 {
        self.base
            + self.trees[..rounds.min(self.trees.len())]
                .iter()
                .map(|t| self.learning_rate * t.predict(x))
                .sum::<f64>()
    }
}

/// One boosted scorer per class; the prediction is the highest-scoring class
/// (lowest index on ties).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtOneVsRest {
    pub scorers: Vec<Gbt>,
}

impl GbtOneVsRest {
    pub fn fit<R: Rng + ?Sized>(
        x: &[Vec<f64>],
        classes: &[usize],
        n_classes: usize,
        params: &GbtParams,
        rng: &mut R,
    ) -> Self {
        let scorers = (0..n_classes)
            .map(|c| {
                let y: Vec<f64> = classes.iter().map(|&k| f64::from(u8::from(k == c))).collect();
                Gbt::fit(x, &y, params, rng)
            })
            .collect();
        GbtOneVsRest { scorers }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, s) in self.scorers.iter().enumerate() {
            let v = s.predict(x);
            if v > best_score {
                best = c;
                best_score = v;
            }
        }
        best
    }
}
