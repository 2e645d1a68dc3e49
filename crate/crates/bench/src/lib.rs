//! Experiment harness for comparing the baseline, OnMAR and OffMAR:
//! repeated seeded runs, Mann–Whitney comparisons, rankings, accuracy gain
//! per second and the divergence diagnostic.

pub mod analysis;
pub mod experiment;
pub mod ranking;
pub mod stats;
