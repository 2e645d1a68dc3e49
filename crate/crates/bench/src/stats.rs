//! Mann–Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use onmar_core::{Error, Result};

/// Largest combined sample size for which the exact null distribution is
/// used (when there are no ties).
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// `a` tends to be smaller than `b`.
    Less,
    /// `a` tends to be larger than `b`.
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwuResult {
    /// U statistic of `a`: the number of pairs with `a_i > b_j`, ties counting one half.
    pub u: f64,
    pub p: f64,
    pub exact: bool,
}

/// Mid-ranks (1-based) of the pooled sample, plus the tie-group sizes.
fn pooled_ranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let mid = (i + j + 1) as f64 / 2.0;
        for p in &pooled[i..j] {
            ranks[p.1] = mid;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Number of `m`-subsets of `{0, .., n-1}` (as rank offsets) whose U value
/// equals each `u` in `0..=m*(n-m)`.
fn exact_u_counts(m: usize, n: usize) -> Vec<f64> {
    let k = n - m;
    // f[i][j][u]: ways to pick j of the first i items with U = u
    let max_u = m * k;
    let mut f = vec![vec![0.0f64; max_u + 1]; m + 1];
    f[0][0] = 1.0;
    for i in 0..n {
        for j in (0..=m.min(i)).rev() {
            if j + 1 > m {
                continue;
            }
            // item i placed in sample a after (i - j) items of b: adds (i - j) to U
            let add = i - j;
            if add > k {
                continue;
            }
            for u in (0..=max_u - add).rev() {
                let v = f[j][u];
                if v != 0.0 {
                    f[j + 1][u + add] += v;
                }
            }
        }
    }
    f[m].clone()
}

/// Mann–Whitney U test of `a` against `b`.
///
/// Exact when `|a| + |b| <= EXACT_LIMIT` and the pooled sample has no
/// ties; otherwise the normal approximation with tie correction and a 0.5
/// continuity correction. A zero-variance sample gives `p = 1`.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alternative: Alternative) -> Result<MwuResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples("Mann-Whitney U needs non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig("Mann-Whitney U needs finite samples".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let (ranks, ties) = pooled_ranks(a, b);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    let mean = (na * nb) as f64 / 2.0;

    if n <= EXACT_LIMIT && ties.is_empty() {
        let counts = exact_u_counts(na, n);
        let total: f64 = counts.iter().sum();
        let u_obs = u.round() as usize;
        let p_le = counts[..=u_obs].iter().sum::<f64>() / total;
        let p_ge = counts[u_obs..].iter().sum::<f64>() / total;
        let p = match alternative {
            Alternative::Less => p_le,
            Alternative::Greater => p_ge,
            Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
        };
        return Ok(MwuResult { u, p, exact: true });
    }

    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1)) as f64;
    let var = (na * nb) as f64 / 12.0 * ((n + 1) as f64 - tie_term);
    if var <= 0.0 {
        return Ok(MwuResult { u, p: 1.0, exact: false });
    }
    let sd = var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p = match alternative {
        Alternative::Less => normal.cdf((u - mean + 0.5) / sd),
        Alternative::Greater => normal.sf((u - mean - 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((u - mean).abs() - 0.5) / sd;
            (2.0 * normal.sf(z)).min(1.0)
        }
    };
    Ok(MwuResult {
        u,
        p: p.clamp(0.0, 1.0),
        exact: false,
    })
}
