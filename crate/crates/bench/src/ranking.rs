use serde::{Deserialize, Serialize};

use crate::stats::{mann_whitney_u, Alternative};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub approach: String,
    /// Pairwise comparisons in which this approach was significantly better.
    pub wins: usize,
    /// Dense rank of `wins`, descending; 1 is best.
    pub rank: usize,
}

/// Dense ranks (1 = best) of `scores`, higher scores first.
pub fn dense_rank_desc(scores: &[f64]) -> Vec<usize> {
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    scores
        .iter()
        .map(|s| distinct.iter().position(|d| d == s).unwrap() + 1)
        .collect()
}

/// Pairwise Mann–Whitney comparison of every pair of approaches. A pair
/// awards a win only when the two-sided test rejects at `alpha`, to the side
/// whose U exceeds its null mean. Approaches are ranked by win count.
pub fn rank_approaches(samples: &[(String, Vec<f64>)], alpha: f64) -> Vec<RankEntry> {
    let m = samples.len();
    let mut wins = vec![0usize; m];
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&samples[i].1, &samples[j].1);
            let Ok(r) = mann_whitney_u(a, b, Alternative::TwoSided) else {
                continue;
            };
            if r.p >= alpha {
                continue;
            }
            let mean = (a.len() * b.len()) as f64 / 2.0;
            if r.u > mean {
                wins[i] += 1;
            } else if r.u < mean {
                wins[j] += 1;
            }
        }
    }
    let ranks = dense_rank_desc(&wins.iter().map(|&w| w as f64).collect::<Vec<_>>());
    samples
        .iter()
        .zip(wins)
        .zip(ranks)
        .map(|((s, wins), rank)| RankEntry {
            approach: s.0.clone(),
            wins,
            rank,
        })
        .collect()
}

/// Normalised ranks across several datasets: the dense rank of each
/// approach's average rank, lowest average first. `ranks[d][a]` is the rank
/// of approach `a` on dataset `d`.
pub fn normalise_ranks(ranks: &[Vec<usize>]) -> Vec<usize> {
    let Some(first) = ranks.first() else {
        return Vec::new();
    };
    let avg: Vec<f64> = (0..first.len())
        .map(|a| -(ranks.iter().map(|r| r[a] as f64).sum::<f64>() / ranks.len() as f64))
        .collect();
    dense_rank_desc(&avg)
}
