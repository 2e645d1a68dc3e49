//! Post-hoc analysis of run logs: accuracy gained per second and the
//! predicted-versus-actual divergence detector.

use serde::{Deserialize, Serialize};

use onmar_core::RunLog;

/// Accuracy in effect at time `s`: that of the last timestep finished by
/// `s`, or of the first timestep before any has finished.
fn accuracy_at(log: &RunLog, s: f64) -> f64 {
    let mut acc = log.records[0].actual_performance;
    for r in &log.records {
        if r.elapsed_wall_seconds <= s {
            acc = r.actual_performance;
        } else {
            break;
        }
    }
    acc
}

/// Mean per-second change of the piecewise-constant accuracy trace sampled
/// at whole seconds `0..=floor(T)`. `None` for runs shorter than a second.
pub fn gain_per_second(log: &RunLog) -> Option<f64> {
    if log.is_empty() {
        return None;
    }
    let seconds = log.total_seconds().floor() as usize;
    if seconds == 0 {
        return None;
    }
    let trace: Vec<f64> = (0..=seconds).map(|s| accuracy_at(log, s as f64)).collect();
    Some(trace.windows(2).map(|w| w[1] - w[0]).sum::<f64>() / seconds as f64)
}

/// Per-second gain averaged over repeats; runs without a defined gain count
/// as 0.
pub fn accuracy_per_second(logs: &[RunLog]) -> f64 {
    if logs.is_empty() {
        return 0.0;
    }
    logs.iter().map(|l| gain_per_second(l).unwrap_or(0.0)).sum::<f64>() / logs.len() as f64
}

/// Min-max normalise every cell of `matrix` to [0, 1] using the extremes of
/// the whole matrix. A matrix whose cells are all equal maps to 0.
pub fn normalise_matrix(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let all = matrix.iter().flatten().copied();
    let lo = all.clone().fold(f64::INFINITY, f64::min);
    let hi = all.fold(f64::NEG_INFINITY, f64::max);
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
                .collect()
        })
        .collect()
}

pub const DEFAULT_DELTA: f64 = 0.2;
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    /// `predicted − actual` per timestep; `None` where no prediction was made.
    pub series: Vec<Option<f64>>,
    pub flagged: bool,
    /// Timestep completing the first offending window.
    pub first_flag: Option<usize>,
}

/// Flags `window` consecutive timesteps in which a prediction exists, it
/// exceeds the actual performance by more than `delta`, and the design
/// engine was not invoked.
pub fn diagnose(log: &RunLog, delta: f64, window: usize) -> Divergence {
    let series: Vec<Option<f64>> = log
        .records
        .iter()
        .map(|r| r.predicted_performance.map(|p| p - r.actual_performance))
        .collect();
    let mut run = 0;
    let mut first_flag = None;
    for (r, gap) in log.records.iter().zip(&series) {
        let bad = !r.ga_invoked && gap.is_some_and(|g| g > delta);
        run = if bad { run + 1 } else { 0 };
        if run >= window.max(1) && first_flag.is_none() {
            first_flag = Some(r.timestep);
        }
    }
    Divergence {
        series,
        flagged: first_flag.is_some(),
        first_flag,
    }
}
