use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Latin hypercube sample of `n` points inside `bounds`.
///
/// Each dimension is cut into `n` equal-width strata; every stratum holds
/// exactly one point, jittered uniformly inside it, and the stratum order is
/// permuted independently per dimension.
pub fn latin_hypercube_sample<R: Rng + ?Sized>(
    n: usize,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InsufficientSamples("LHS needs at least one point".into()));
    }
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateBounds { dim, lo, hi });
        }
    }
    let mut points = vec![vec![0.0; bounds.len()]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        strata.shuffle(rng);
        let width = (hi - lo) / n as f64;
        for (point, &s) in points.iter_mut().zip(&strata) {
            // keep clear of the upper stratum edge so rounding cannot push a
            // point into the next stratum
            let u = rng.random::<f64>().min(1.0 - 1e-9);
            point[dim] = lo + (s as f64 + u) * width;
        }
    }
    Ok(points)
}
