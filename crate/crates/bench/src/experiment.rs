//! Repeated, seeded comparison of the baseline, OnMAR and OffMAR on one
//! dataset, with persistence and aggregation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::{error, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use onmar_core::clusterapp::{
    generate_blobs, load_csv, stratified_two_folds, ClusterApp, ClusterFeatureExtractor,
    LabeledDataset,
};
use onmar_core::metafeatures::DEFAULT_SAMPLES;
use onmar_core::metalearners::LearnerKind;
use onmar_core::rng::{child_rng, derive_seed, Stream};
use onmar_core::{offmar_run, onmar_run, Error, GaEngine, Result, RunConfig, RunLog};

use crate::analysis::{accuracy_per_second, normalise_matrix};
use crate::ranking::{rank_approaches, RankEntry, DEFAULT_ALPHA};
use crate::stats::{mann_whitney_u, Alternative};

/// θ_p used by the baseline; no prediction reaches it, so the design engine
/// runs at every timestep.
pub const BASELINE_THETA_P: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approach {
    Baseline,
    Onmar(LearnerKind),
    Offmar(LearnerKind),
}

impl Approach {
    pub const ALL: [Approach; 7] = [
        Approach::Baseline,
        Approach::Onmar(LearnerKind::Knn),
        Approach::Onmar(LearnerKind::Rf),
        Approach::Onmar(LearnerKind::Gbt),
        Approach::Offmar(LearnerKind::Knn),
        Approach::Offmar(LearnerKind::Rf),
        Approach::Offmar(LearnerKind::Gbt),
    ];
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Baseline => write!(f, "baseline"),
            Approach::Onmar(k) => write!(f, "onmar_{}", k.name()),
            Approach::Offmar(k) => write!(f, "offmar_{}", k.name()),
        }
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "baseline" {
            return Ok(Approach::Baseline);
        }
        if let Some(k) = s.strip_prefix("onmar_") {
            return Ok(Approach::Onmar(k.parse()?));
        }
        if let Some(k) = s.strip_prefix("offmar_") {
            return Ok(Approach::Offmar(k.parse()?));
        }
        Err(Error::InvalidConfig(format!("unknown approach {s:?}")))
    }
}

impl Serialize for Approach {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Approach {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    Blobs { n: usize, k: usize, d: usize, separation: f64 },
    Csv { path: PathBuf, has_header: bool },
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            DatasetSource::Blobs { n, k, d, separation } => format!("blobs-n{n}-k{k}-d{d}-sep{separation}"),
            DatasetSource::Csv { path, .. } => path
                .file_stem()
                .map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// The dataset for the run seeded with `seed`. Blobs are regenerated
    /// per seed; CSV data is fixed.
    pub fn materialise(&self, seed: u64) -> Result<LabeledDataset> {
        match self {
            DatasetSource::Blobs { n, k, d, separation } => {
                generate_blobs(*n, *k, *d, *separation, &mut child_rng(seed, Stream::Dataset))
            }
            DatasetSource::Csv { path, has_header } => load_csv(path, *has_header),
        }
    }
}

/// `blobs:n,k,d,sep`, `csv:path` or `csv-header:path`.
impl FromStr for DatasetSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("cannot parse dataset {s:?}"));
        if let Some(rest) = s.strip_prefix("blobs:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(bad());
            }
            return Ok(DatasetSource::Blobs {
                n: parts[0].parse().map_err(|_| bad())?,
                k: parts[1].parse().map_err(|_| bad())?,
                d: parts[2].parse().map_err(|_| bad())?,
                separation: parts[3].parse().map_err(|_| bad())?,
            });
        }
        if let Some(p) = s.strip_prefix("csv-header:") {
            return Ok(DatasetSource::Csv { path: p.into(), has_header: true });
        }
        if let Some(p) = s.strip_prefix("csv:") {
            return Ok(DatasetSource::Csv { path: p.into(), has_header: false });
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub approaches: Vec<Approach>,
    pub dataset: DatasetSource,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Template for every run. Its seed is the root seed; the meta-learner
    /// and θ_p are overridden per approach where needed.
    pub config: RunConfig,
    #[serde(default = "default_samples")]
    pub landscape_samples: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_repeats() -> usize {
    30
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_workers() -> usize {
    1
}

impl ExperimentSpec {
    pub fn new(approaches: Vec<Approach>, dataset: DatasetSource, config: RunConfig) -> Self {
        ExperimentSpec {
            approaches,
            dataset,
            repeats: default_repeats(),
            config,
            landscape_samples: default_samples(),
            out: None,
            workers: default_workers(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be >= 1".into()));
        }
        if self.approaches.is_empty() {
            return Err(Error::InvalidConfig("no approaches selected".into()));
        }
        self.config.validate()
    }

    /// Seed of repeat `i`, shared by every approach.
    pub fn repeat_seed(&self, i: usize) -> u64 {
        derive_seed(self.config.seed, i as u64)
    }

    pub fn run_config(&self, approach: Approach, repeat: usize) -> RunConfig {
        let mut c = self.config.clone();
        c.seed = self.repeat_seed(repeat);
        match approach {
            Approach::Baseline => {
                c.theta_p = BASELINE_THETA_P;
                c.meta_learner = LearnerKind::Knn;
            }
            Approach::Onmar(k) | Approach::Offmar(k) => c.meta_learner = k,
        }
        c
    }
}

/// Outcome of a single (approach, repeat) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub approach: Approach,
    pub dataset: String,
    pub repeat: usize,
    pub seed: u64,
    pub final_accuracy: f64,
    /// Whole-run wall-clock seconds; OffMAR includes both phases and training.
    pub wall_seconds: f64,
    /// Engine invocations over the whole run, both phases for OffMAR.
    pub ga_calls: usize,
    pub pruning_fell_back: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub summary: RunSummary,
    /// Evaluation-fold log (phase 2 for OffMAR).
    pub log: RunLog,
    /// OffMAR phase-1 log.
    pub phase1_log: Option<RunLog>,
}

/// Execute one run. Every approach of repeat `i` sees the same dataset and
/// folds. OnMAR and the baseline run on the second fold; OffMAR learns on the
/// first and is evaluated on the second.
pub fn run_single(spec: &ExperimentSpec, approach: Approach, repeat: usize) -> Result<RunResult> {
    let config = spec.run_config(approach, repeat);
    let seed = config.seed;
    let data = spec.dataset.materialise(seed)?;
    let (fold1, fold2) = stratified_two_folds(&data, &mut child_rng(seed, Stream::Folds))?;
    let mut app = ClusterApp::new(seed);
    let mut extractor = ClusterFeatureExtractor::new(spec.landscape_samples, seed);
    let mut engine = GaEngine::new(config.ga.clone(), seed);
    let start = Instant::now();
    let (log, phase1_log, fell_back) = match approach {
        Approach::Baseline | Approach::Onmar(_) => {
            let out = onmar_run(&config, &fold2, &mut app, &mut engine, &mut extractor)?;
            (out.log, None, false)
        }
        Approach::Offmar(_) => {
            let out = offmar_run(&config, &fold1, &fold2, &mut app, &mut engine, &mut extractor)?;
            (out.phase2, Some(out.phase1.log), out.fell_back)
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let ga_calls = log.ga_calls() + phase1_log.as_ref().map_or(0, RunLog::ga_calls);
    Ok(RunResult {
        summary: RunSummary {
            approach,
            dataset: spec.dataset.name(),
            repeat,
            seed,
            final_accuracy: log.final_performance().unwrap_or(0.0),
            wall_seconds,
            ga_calls,
            pruning_fell_back: fell_back,
        },
        log,
        phase1_log,
    })
}

/// One (approach, repeat) outcome; failed runs carry the error message.
pub type Outcome = (Approach, usize, std::result::Result<RunResult, String>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachSummary {
    pub approach: Approach,
    /// Final accuracy per completed repeat.
    pub final_accuracies: Vec<f64>,
    pub wall_seconds: Vec<f64>,
    pub ga_calls: Vec<usize>,
    /// Repeats that failed.
    pub incomplete: Vec<usize>,
    pub median_accuracy: Option<f64>,
    pub median_seconds: Option<f64>,
    /// Mean per-second accuracy gain over repeats, before normalisation.
    pub raw_gain_per_second: f64,
    pub normalised_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: Approach,
    pub b: Approach,
    pub u: f64,
    pub p_two_sided: f64,
    /// One-tailed p for "a is less accurate than b".
    pub p_less: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub dataset: String,
    pub repeats: usize,
    pub approaches: Vec<ApproachSummary>,
    pub pairwise: Vec<PairwiseTest>,
    pub ranks: Vec<RankEntry>,
}

impl ComparisonReport {
    pub fn approach(&self, a: Approach) -> Option<&ApproachSummary> {
        self.approaches.iter().find(|s| s.approach == a)
    }

    /// The report with every wall-clock derived field cleared.
    pub fn without_timing(&self) -> ComparisonReport {
        let mut r = self.clone();
        for a in &mut r.approaches {
            a.wall_seconds.clear();
            a.median_seconds = None;
            a.raw_gain_per_second = 0.0;
            a.normalised_gain = 0.0;
        }
        r
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    Some(if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) })
}

/// Aggregate run outcomes (failed runs as `Err`) into a report. Gains are
/// min-max normalised over the approaches of this report.
pub fn aggregate(
    dataset: &str,
    repeats: usize,
    approaches: &[Approach],
    results: &[Outcome],
) -> ComparisonReport {
    let mut summaries: Vec<ApproachSummary> = approaches
        .iter()
        .map(|&approach| {
            let mut s = ApproachSummary {
                approach,
                final_accuracies: Vec::new(),
                wall_seconds: Vec::new(),
                ga_calls: Vec::new(),
                incomplete: Vec::new(),
                median_accuracy: None,
                median_seconds: None,
                raw_gain_per_second: 0.0,
                normalised_gain: 0.0,
            };
            let mut logs = Vec::new();
            for (a, repeat, r) in results.iter().filter(|r| r.0 == approach) {
                debug_assert_eq!(*a, approach);
                match r {
                    Ok(run) => {
                        s.final_accuracies.push(run.summary.final_accuracy);
                        s.wall_seconds.push(run.summary.wall_seconds);
                        s.ga_calls.push(run.summary.ga_calls);
                        logs.push(run.log.clone());
                    }
                    Err(_) => s.incomplete.push(*repeat),
                }
            }
            s.median_accuracy = median(&s.final_accuracies);
            s.median_seconds = median(&s.wall_seconds);
            s.raw_gain_per_second = accuracy_per_second(&logs);
            s
        })
        .collect();

    let gains = normalise_matrix(&[summaries.iter().map(|s| s.raw_gain_per_second).collect()]);
    for (s, g) in summaries.iter_mut().zip(&gains[0]) {
        s.normalised_gain = *g;
    }

    let mut pairwise = Vec::new();
    for i in 0..summaries.len() {
        for j in i + 1..summaries.len() {
            let (a, b) = (&summaries[i], &summaries[j]);
            let two = mann_whitney_u(&a.final_accuracies, &b.final_accuracies, Alternative::TwoSided);
            let less = mann_whitney_u(&a.final_accuracies, &b.final_accuracies, Alternative::Less);
            if let (Ok(two), Ok(less)) = (two, less) {
                pairwise.push(PairwiseTest {
                    a: a.approach,
                    b: b.approach,
                    u: two.u,
                    p_two_sided: two.p,
                    p_less: less.p,
                });
            }
        }
    }
    let samples: Vec<(String, Vec<f64>)> = summaries
        .iter()
        .map(|s| (s.approach.to_string(), s.final_accuracies.clone()))
        .collect();
    let ranks = if samples.len() >= 2 {
        rank_approaches(&samples, DEFAULT_ALPHA)
    } else {
        Vec::new()
    };
    ComparisonReport {
        dataset: dataset.into(),
        repeats,
        approaches: summaries,
        pairwise,
        ranks,
    }
}

pub fn run_directory(out: &Path, approach: Approach, dataset: &str) -> PathBuf {
    out.join(format!("{approach}__{dataset}"))
}

fn persist(out: &Path, dataset: &str, results: &[Outcome]) -> Result<()> {
    let mut by_dir: std::collections::BTreeMap<PathBuf, Vec<serde_json::Value>> = Default::default();
    for (approach, repeat, r) in results {
        let dir = run_directory(out, *approach, dataset);
        fs::create_dir_all(&dir)?;
        let entry = match r {
            Ok(run) => {
                run.log.save(&dir.join(format!("run_{repeat}.jsonl")))?;
                if let Some(p1) = &run.phase1_log {
                    p1.save(&dir.join(format!("run_{repeat}.phase1.jsonl")))?;
                }
                serde_json::to_value(&run.summary)?
            }
            Err(message) => serde_json::json!({
                "approach": approach,
                "repeat": repeat,
                "incomplete": true,
                "error": message,
            }),
        };
        by_dir.entry(dir).or_default().push(entry);
    }
    for (dir, entries) in by_dir {
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&entries)?)?;
    }
    Ok(())
}

/// Write `report.json` plus CSV tables of per-run accuracies, ranks and
/// normalised gains.
pub fn write_report(out: &Path, reports: &[ComparisonReport]) -> Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join("report.json"), serde_json::to_string_pretty(reports)?)?;

    let mut acc = csv::Writer::from_path(out.join("accuracy.csv"))?;
    acc.write_record(["dataset", "approach", "sample", "final_accuracy", "wall_seconds", "ga_calls"])?;
    let mut ranks = csv::Writer::from_path(out.join("ranks.csv"))?;
    ranks.write_record(["dataset", "approach", "wins", "rank"])?;
    let mut gains = csv::Writer::from_path(out.join("gains.csv"))?;
    gains.write_record(["dataset", "approach", "raw_gain_per_second", "normalised_gain"])?;
    for r in reports {
        for s in &r.approaches {
            let name = s.approach.to_string();
            for i in 0..s.final_accuracies.len() {
                acc.write_record([
                    r.dataset.clone(),
                    name.clone(),
                    i.to_string(),
                    s.final_accuracies[i].to_string(),
                    s.wall_seconds.get(i).map_or(String::new(), f64::to_string),
                    s.ga_calls[i].to_string(),
                ])?;
            }
            gains.write_record([
                r.dataset.clone(),
                name,
                s.raw_gain_per_second.to_string(),
                s.normalised_gain.to_string(),
            ])?;
        }
        for e in &r.ranks {
            ranks.write_record([r.dataset.clone(), e.approach.clone(), e.wins.to_string(), e.rank.to_string()])?;
        }
    }
    acc.flush()?;
    ranks.flush()?;
    gains.flush()?;
    Ok(())
}

/// Run every (approach, repeat) pair of `spec` on up to `spec.workers`
/// threads, persist logs when an output directory is set, and aggregate.
/// A failed run is recorded as incomplete instead of aborting the sweep.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<(ComparisonReport, Vec<RunResult>)> {
    spec.validate()?;
    let tasks: Vec<(Approach, usize)> = (0..spec.repeats)
        .flat_map(|i| spec.approaches.iter().map(move |&a| (a, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Outcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(a, i)| {
                let r = run_single(spec, a, i).map_err(|e| {
                    error!("{a} repeat {i} failed: {e}");
                    e.to_string()
                });
                if let Ok(run) = &r {
                    info!(
                        "{a} repeat {i}: accuracy {:.4}, {:.2}s, {} engine calls",
                        run.summary.final_accuracy, run.summary.wall_seconds, run.summary.ga_calls
                    );
                }
                (a, i, r)
            })
            .collect()
    });
    let dataset = spec.dataset.name();
    if let Some(out) = &spec.out {
        persist(out, &dataset, &results)?;
    }
    let report = aggregate(&dataset, spec.repeats, &spec.approaches, &results);
    if let Some(out) = &spec.out {
        write_report(out, std::slice::from_ref(&report))?;
    }
    let runs = results.into_iter().filter_map(|(_, _, r)| r.ok()).collect();
    Ok((report, runs))
}

/// Rebuild reports from a results directory written by [`run_experiment`].
pub fn report_from_directory(dir: &Path) -> Result<Vec<ComparisonReport>> {
    let mut groups: std::collections::BTreeMap<String, Vec<Outcome>> =
        Default::default();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
            continue;
        };
        let Some((approach, dataset)) = name.split_once("__") else {
            continue;
        };
        let Ok(approach) = approach.parse::<Approach>() else {
            continue;
        };
        let summaries: Vec<serde_json::Value> =
            serde_json::from_str(&fs::read_to_string(path.join("summary.json"))?)?;
        for v in summaries {
            let repeat = v["repeat"].as_u64().unwrap_or(0) as usize;
            let result = if v.get("incomplete").is_some() {
                Err(v["error"].as_str().unwrap_or("failed").to_owned())
            } else {
                let summary: RunSummary = serde_json::from_value(v)?;
                let log = RunLog::load(&path.join(format!("run_{repeat}.jsonl")))?;
                let p1 = path.join(format!("run_{repeat}.phase1.jsonl"));
                let phase1_log = if p1.exists() { Some(RunLog::load(&p1)?) } else { None };
                Ok(RunResult { summary, log, phase1_log })
            };
            groups.entry(dataset.to_owned()).or_default().push((approach, repeat, result));
        }
    }
    let mut reports = Vec::new();
    for (dataset, mut results) in groups {
        results.sort_by_key(|r| (r.1, Approach::ALL.iter().position(|a| *a == r.0)));
        let mut approaches: Vec<Approach> = Vec::new();
        for a in Approach::ALL {
            if results.iter().any(|r| r.0 == a) {
                approaches.push(a);
            }
        }
        let repeats = results.iter().map(|r| r.1 + 1).max().unwrap_or(0);
        reports.push(aggregate(&dataset, repeats, &approaches, &results));
    }
    // gains are normalised across the whole dataset x approach matrix
    let matrix: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| r.approaches.iter().map(|s| s.raw_gain_per_second).collect())
        .collect();
    let normalised = normalise_matrix(&matrix);
    for (r, row) in reports.iter_mut().zip(normalised) {
        for (s, g) in r.approaches.iter_mut().zip(row) {
            s.normalised_gain = g;
        }
    }
    Ok(reports)
}
