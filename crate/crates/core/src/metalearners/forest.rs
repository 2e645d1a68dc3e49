use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, Node, Task, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    /// Candidate features per split; `None` uses `floor(sqrt(F))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            max_depth: 8,
            max_features: None,
        }
    }
}

/// Bootstrap-aggregated CART trees with random feature subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub task: Task,
    pub trees: Vec<Node>,
}

impl Forest {
    pub fn fit<R: Rng + ?Sized>(x: &[Vec<f64>], y: &[f64], params: &ForestParams, task: Task, rng: &mut R) -> Self {
        let n = x.len();
        let width = x.first().map_or(0, Vec::len);
        let subset = params
            .max_features
            .unwrap_or_else(|| ((width as f64).sqrt().floor() as usize).max(1));
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            max_features: Some(subset),
            task,
        };
        let trees = (0..params.trees.max(1))
            .map(|_| {
                let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                fit_tree(x, y, &sample, tree_params, rng)
            })
            .collect();
        Forest { task, trees }
    }

    /// Mean of tree outputs (regression) or majority vote with ties to the
    /// lowest class (classification).
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.task {
            Task::Regression => {
                self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
            }
            Task::Classification { n_classes } => {
                let mut votes = vec![0usize; n_classes.max(1)];
                for t in &self.trees {
                    votes[t.predict(x) as usize] += 1;
                }
                let mut best = 0;
                for c in 1..votes.len() {
                    if votes[c] > votes[best] {
                        best = c;
                    }
                }
                best as f64
            }
        }
    }

    /// Class votes per tree, in tree order.
    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        self.trees.iter().map(|t| t.predict(x) as usize).collect()
    }
}
