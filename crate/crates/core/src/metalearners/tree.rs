//! CART trees over a row-major feature matrix. Splits are searched over
//! per-feature presorted sample lists that are partitioned alongside the
//! tree, so each node costs one linear scan per candidate feature.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Minimise the sum of squared errors; leaves hold the mean target.
    Regression,
    /// Minimise weighted Gini impurity; leaves hold the majority class
    /// (lowest index on ties) as a float.
    Classification { n_classes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    /// Candidate features per split; `None` uses every feature.
    pub max_features: Option<usize>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

struct Builder<'a> {
    /// `x[slot][feature]` for every sample slot.
    x: Vec<&'a [f64]>,
    y: Vec<f64>,
    params: TreeParams,
    n_features: usize,
}

struct Best {
    score: f64,
    feature: usize,
    /// Position in the feature's sorted list where the right child starts.
    cut: usize,
    threshold: f64,
}

/// Fit a tree to the rows listed in `sample` (duplicates allowed, as in a
/// bootstrap sample).
pub fn fit_tree<R: Rng + ?Sized>(
    x: &[Vec<f64>],
    y: &[f64],
    sample: &[usize],
    params: TreeParams,
    rng: &mut R,
) -> Node {
    let n_features = x.first().map_or(0, Vec::len);
    let builder = Builder {
        x: sample.iter().map(|&r| x[r].as_slice()).collect(),
        y: sample.iter().map(|&r| y[r]).collect(),
        params,
        n_features,
    };
    let m = sample.len();
    let sorted: Vec<Vec<usize>> = (0..n_features)
        .map(|f| {
            let mut s: Vec<usize> = (0..m).collect();
            s.sort_by(|&a, &b| builder.x[a][f].total_cmp(&builder.x[b][f]).then(a.cmp(&b)));
            s
        })
        .collect();
    let mut goes_left = vec![false; m];
    builder.build(sorted, (0..m).collect(), 0, &mut goes_left, rng)
}

impl Builder<'_> {
    fn leaf_value(&self, slots: &[usize]) -> f64 {
        match self.params.task {
            Task::Regression => {
                if slots.is_empty() {
                    0.0
                } else {
                    slots.iter().map(|&s| self.y[s]).sum::<f64>() / slots.len() as f64
                }
            }
            Task::Classification { n_classes } => {
                let mut counts = vec![0usize; n_classes.max(1)];
                for &s in slots {
                    counts[self.y[s] as usize] += 1;
                }
                let mut best = 0;
                for c in 1..counts.len() {
                    if counts[c] > counts[best] {
                        best = c;
                    }
                }
                best as f64
            }
        }
    }

    fn impurity(&self, slots: &[usize]) -> f64 {
        let m = slots.len() as f64;
        match self.params.task {
            Task::Regression => {
                let (s, sq) = slots
                    .iter()
                    .fold((0.0, 0.0), |(s, sq), &i| (s + self.y[i], sq + self.y[i] * self.y[i]));
                sq - s * s / m
            }
            Task::Classification { n_classes } => {
                let mut counts = vec![0f64; n_classes.max(1)];
                for &i in slots {
                    counts[self.y[i] as usize] += 1.0;
                }
                m - counts.iter().map(|c| c * c).sum::<f64>() / m
            }
        }
    }

    fn best_split(&self, feature: usize, order: &[usize], best: &mut Option<Best>) {
        let m = order.len();
        let score_at = |cut: usize, best: &mut Option<Best>, score: f64| {
            if best.as_ref().is_none_or(|b| score < b.score) {
                let lo = self.x[order[cut - 1]][feature];
                let hi = self.x[order[cut]][feature];
                let mut threshold = 0.5 * (lo + hi);
                if threshold >= hi {
                    threshold = lo;
                }
                *best = Some(Best {
                    score,
                    feature,
                    cut,
                    threshold,
                });
            }
        };
        match self.params.task {
            Task::Regression => {
                let (total, total_sq) = order
                    .iter()
                    .fold((0.0, 0.0), |(s, sq), &i| (s + self.y[i], sq + self.y[i] * self.y[i]));
                let (mut ls, mut lsq) = (0.0, 0.0);
                for cut in 1..m {
                    let y = self.y[order[cut - 1]];
                    ls += y;
                    lsq += y * y;
                    if self.x[order[cut - 1]][feature] == self.x[order[cut]][feature] {
                        continue;
                    }
                    let (nl, nr) = (cut as f64, (m - cut) as f64);
                    let rs = total - ls;
                    let rsq = total_sq - lsq;
                    let sse = (lsq - ls * ls / nl) + (rsq - rs * rs / nr);
                    score_at(cut, best, sse);
                }
            }
            Task::Classification { n_classes } => {
                let mut left = vec![0f64; n_classes];
                let mut right = vec![0f64; n_classes];
                for &i in order {
                    right[self.y[i] as usize] += 1.0;
                }
                let mut lsq = 0.0;
                let mut rsq: f64 = right.iter().map(|c| c * c).sum();
                for cut in 1..m {
                    let c = self.y[order[cut - 1]] as usize;
                    lsq += 2.0 * left[c] + 1.0;
                    left[c] += 1.0;
                    rsq -= 2.0 * right[c] - 1.0;
                    right[c] -= 1.0;
                    if self.x[order[cut - 1]][feature] == self.x[order[cut]][feature] {
                        continue;
                    }
                    let (nl, nr) = (cut as f64, (m - cut) as f64);
                    let gini = (nl - lsq / nl) + (nr - rsq / nr);
                    score_at(cut, best, gini);
                }
            }
        }
    }

    fn build<R: Rng + ?Sized>(
        &self,
        sorted: Vec<Vec<usize>>,
        slots: Vec<usize>,
        depth: usize,
        goes_left: &mut [bool],
        rng: &mut R,
    ) -> Node {
        let leaf = Node::Leaf {
            value: self.leaf_value(&slots),
        };
        if depth >= self.params.max_depth || slots.len() < 2 || self.n_features == 0 {
            return leaf;
        }
        let parent = self.impurity(&slots);
        if parent <= 1e-12 {
            return leaf;
        }
        let candidates: Vec<usize> = match self.params.max_features {
            Some(f) if f < self.n_features => {
                let mut c = sample_indices(rng, self.n_features, f.max(1)).into_vec();
                c.sort_unstable();
                c
            }
            _ => (0..self.n_features).collect(),
        };
        let mut best = None;
        for &f in &candidates {
            self.best_split(f, &sorted[f], &mut best);
        }
        let Some(best) = best else { return leaf };
        if best.score >= parent - 1e-12 {
            return leaf;
        }

        let order = &sorted[best.feature];
        for &s in &order[..best.cut] {
            goes_left[s] = true;
        }
        for &s in &order[best.cut..] {
            goes_left[s] = false;
        }
        let mut left_sorted = Vec::with_capacity(sorted.len());
        let mut right_sorted = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&s| goes_left[s]);
            left_sorted.push(l);
            right_sorted.push(r);
        }
        let (left_slots, right_slots): (Vec<usize>, Vec<usize>) =
            slots.into_iter().partition(|&s| goes_left[s]);
        let left = self.build(left_sorted, left_slots, depth + 1, goes_left, rng);
        let right = self.build(right_sorted, right_slots, depth + 1, goes_left, rng);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}
