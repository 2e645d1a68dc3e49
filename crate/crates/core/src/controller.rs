//! The OnMAR control loop and the two-phase OffMAR procedure, with the run
//! log and knowledge repository they produce.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::clusterapp::LabeledDataset;
use crate::design::{Design, GeneSchema};
use crate::error::{Error, Result};
use crate::ga::GaParams;
use crate::metafeatures::{FeatureSchema, MetaFeatureVector};
use crate::metalearners::{fit, Hyper, LearnerKind, MetaLearnerModel, TrainingMatrix};
use crate::rng::derive_seed;

/// The controlled application: executes one timestep under a design.
pub trait ApplicationAlgorithm {
    fn schema(&self) -> &GeneSchema;

    /// Restore the initial state for a new run.
    fn reset(&mut self, dataset: &LabeledDataset, seed: u64) -> Result<()>;

    /// Advance one timestep under `design`; returns the achieved performance
    /// in [0, 1].
    fn exec(&mut self, design: &Design, dataset: &LabeledDataset, t: usize) -> Result<f64>;

    /// Performance `design` would achieve at the next timestep, without
    /// advancing. NaN on failure.
    fn lookahead(&self, design: &Design, dataset: &LabeledDataset) -> f64;
}

/// Produces a design for the current timestep.
pub trait DesignEngine {
    fn reset(&mut self, seed: u64);

    fn create_design(
        &mut self,
        schema: &GeneSchema,
        fitness: &dyn Fn(&Design) -> f64,
        t: usize,
    ) -> Result<Design>;
}

/// Computes the meta-feature vector describing the application at `t`.
pub trait MetaFeatureExtractor<A: ?Sized> {
    fn schema(&self) -> FeatureSchema;

    fn reset(&mut self, seed: u64);

    fn extract(&mut self, app: &A, dataset: &LabeledDataset, t: usize) -> Result<MetaFeatureVector>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Last timestep; a run covers `0..=total_timesteps`.
    pub total_timesteps: usize,
    pub theta_t: usize,
    pub theta_p: f64,
    pub meta_learner: LearnerKind,
    pub seed: u64,
    pub ga: GaParams,
    pub hyper: Hyper,
}

impl RunConfig {
    /// Defaults: `theta_t = N / 2`, `theta_p = 0.85`.
    pub fn new(total_timesteps: usize, meta_learner: LearnerKind, seed: u64) -> Self {
        RunConfig {
            total_timesteps,
            theta_t: total_timesteps / 2,
            theta_p: 0.85,
            meta_learner,
            seed,
            ga: GaParams::default(),
            hyper: Hyper::default(),
        }
    }

    /// `theta_p` may exceed 1, which makes the prediction gate unreachable.
    pub fn validate(&self) -> Result<()> {
        if self.total_timesteps == 0 {
            return Err(Error::InvalidConfig("total_timesteps must be positive".into()));
        }
        if self.theta_t > self.total_timesteps {
            return Err(Error::InvalidConfig(format!(
                "theta_t = {} exceeds total_timesteps = {}",
                self.theta_t, self.total_timesteps
            )));
        }
        if !self.theta_p.is_finite() || self.theta_p < 0.0 {
            return Err(Error::InvalidConfig(format!("theta_p = {} invalid", self.theta_p)));
        }
        self.ga.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimestepRecord {
    pub timestep: usize,
    pub design: Design,
    pub actual_performance: f64,
    pub predicted_performance: Option<f64>,
    pub ga_invoked: bool,
    /// Seconds since the start of the run, at the end of this timestep.
    pub elapsed_wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunLog {
    pub records: Vec<TimestepRecord>,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ga_calls(&self) -> usize {
        self.records.iter().filter(|r| r.ga_invoked).count()
    }

    pub fn final_performance(&self) -> Option<f64> {
        self.records.last().map(|r| r.actual_performance)
    }

    pub fn total_seconds(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_wall_seconds)
    }

    /// Same records with timing zeroed; equal across repeated identical runs.
    pub fn without_timing(&self) -> RunLog {
        RunLog {
            records: self
                .records
                .iter()
                .map(|r| TimestepRecord {
                    elapsed_wall_seconds: 0.0,
                    ..r.clone()
                })
                .collect(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut records = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(RunLog { records })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_jsonl(BufReader::new(File::open(path)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeEntry {
    pub meta_features: MetaFeatureVector,
    pub design: Design,
    pub performance: f64,
    pub timestep: usize,
}

/// Accumulated (meta-features, design, performance) triples with the
/// schemas that describe them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeRepository {
    pub feature_schema: FeatureSchema,
    pub gene_schema: GeneSchema,
    pub entries: Vec<KnowledgeEntry>,
}

impl KnowledgeRepository {
    pub fn new(feature_schema: FeatureSchema, gene_schema: GeneSchema) -> Self {
        KnowledgeRepository {
            feature_schema,
            gene_schema,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: KnowledgeEntry) -> Result<()> {
        entry.meta_features.check_width(&self.feature_schema)?;
        self.gene_schema.validate(&entry.design)?;
        if !(0.0..=1.0).contains(&entry.performance) {
            return Err(Error::InvalidConfig(format!(
                "performance {} outside [0, 1]",
                entry.performance
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn with_entries(&self, entries: Vec<KnowledgeEntry>) -> Self {
        KnowledgeRepository {
            feature_schema: self.feature_schema.clone(),
            gene_schema: self.gene_schema.clone(),
            entries,
        }
    }

    pub fn performance_matrix(&self) -> Result<TrainingMatrix> {
        TrainingMatrix::for_performance(
            &self.gene_schema,
            self.entries
                .iter()
                .map(|e| (e.meta_features.values.as_slice(), &e.design, e.performance)),
        )
    }

    pub fn design_matrix(&self) -> Result<TrainingMatrix> {
        TrainingMatrix::for_designs(
            self.entries
                .iter()
                .map(|e| (e.meta_features.values.as_slice(), &e.design)),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub log: RunLog,
    pub repository: KnowledgeRepository,
}

fn check_engine_design(schema: &GeneSchema, design: &Design, t: usize) -> Result<()> {
    schema
        .validate(design)
        .map_err(|e| Error::Engine(format!("timestep {t}: engine produced an invalid design: {e}")))
}

fn prepare<A, X>(
    config: &RunConfig,
    dataset: &LabeledDataset,
    app: &mut A,
    extractor: &mut X,
) -> Result<(GeneSchema, FeatureSchema)>
where
    A: ApplicationAlgorithm + ?Sized,
    X: MetaFeatureExtractor<A> + ?Sized,
{
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    app.reset(dataset, config.seed)?;
    extractor.reset(config.seed);
    Ok((app.schema().clone(), extractor.schema()))
}

/// The OnMAR loop. For every timestep `t` in `0..=N`: extract meta-features;
/// while `t <= theta_t` invoke the design engine; afterwards predict the
/// carried-over design's performance and invoke the engine only when the
/// prediction is below `theta_p`; execute the application; store the result
/// and retrain the meta-learner on the whole repository.
pub fn onmar_run<A, X>(
    config: &RunConfig,
    dataset: &LabeledDataset,
    app: &mut A,
    engine: &mut dyn DesignEngine,
    extractor: &mut X,
) -> Result<RunOutput>
where
    A: ApplicationAlgorithm + ?Sized,
    X: MetaFeatureExtractor<A> + ?Sized,
{
    let (schema, feature_schema) = prepare(config, dataset, app, extractor)?;
    engine.reset(config.seed);
    let start = Instant::now();
    let mut repository = KnowledgeRepository::new(feature_schema.clone(), schema.clone());
    let mut log = RunLog::default();
    let mut model: Option<MetaLearnerModel> = None;
    let mut current: Option<Design> = None;

    for t in 0..=config.total_timesteps {
        let features = extractor.extract(app, dataset, t)?;
        features.check_width(&feature_schema)?;

        let mut predicted = None;
        let mut invoke = true;
        if t > config.theta_t {
            if let (Some(m), Some(c)) = (&model, &current) {
                let p = m.predict_performance(&features.values, c)?;
                predicted = Some(p);
                invoke = p < config.theta_p;
            }
        }
        if invoke {
            let app_ref: &A = app;
            let design = engine.create_design(&schema, &|d| app_ref.lookahead(d, dataset), t)?;
            check_engine_design(&schema, &design, t)?;
            current = Some(design);
        }
        let design = current.clone().expect("timestep 0 always invokes the engine");
        let performance = app.exec(&design, dataset, t)?;
        debug!("t = {t}: p = {performance:.4}, predicted = {predicted:?}, engine = {invoke}");

        repository.push(KnowledgeEntry {
            meta_features: features,
            design: design.clone(),
            performance,
            timestep: t,
        })?;
        model = Some(fit(
            config.meta_learner,
            &repository.performance_matrix()?,
            &config.hyper,
            derive_seed(config.seed, t as u64),
        )?);

        log.records.push(TimestepRecord {
            timestep: t,
            design,
            actual_performance: performance,
            predicted_performance: predicted,
            ga_invoked: invoke,
            elapsed_wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(RunOutput { log, repository })
}

/// OffMAR phase 1: the engine designs every timestep of the first fold and
/// each timestep is stored. No meta-learner is trained.
pub fn offmar_phase1<A, X>(
    config: &RunConfig,
    fold1: &LabeledDataset,
    app: &mut A,
    engine: &mut dyn DesignEngine,
    extractor: &mut X,
) -> Result<RunOutput>
where
    A: ApplicationAlgorithm + ?Sized,
    X: MetaFeatureExtractor<A> + ?Sized,
{
    let (schema, feature_schema) = prepare(config, fold1, app, extractor)?;
    engine.reset(config.seed);
    let start = Instant::now();
    let mut repository = KnowledgeRepository::new(feature_schema.clone(), schema.clone());
    let mut log = RunLog::default();
    for t in 0..=config.total_timesteps {
        let features = extractor.extract(app, fold1, t)?;
        features.check_width(&feature_schema)?;
        let app_ref: &A = app;
        let design = engine.create_design(&schema, &|d| app_ref.lookahead(d, fold1), t)?;
        check_engine_design(&schema, &design, t)?;
        let performance = app.exec(&design, fold1, t)?;
        repository.push(KnowledgeEntry {
            meta_features: features,
            design: design.clone(),
            performance,
            timestep: t,
        })?;
        log.records.push(TimestepRecord {
            timestep: t,
            design,
            actual_performance: performance,
            predicted_performance: None,
            ga_invoked: true,
            elapsed_wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(RunOutput { log, repository })
}

/// Entries with performance `>= theta_p`, order preserved. An empty result
/// is reported as [`Error::EmptyPrunedRepository`].
pub fn kr_prune(kr: &KnowledgeRepository, theta_p: f64) -> Result<KnowledgeRepository> {
    let kept: Vec<KnowledgeEntry> = kr
        .entries
        .iter()
        .filter(|e| e.performance >= theta_p)
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyPrunedRepository { theta_p });
    }
    Ok(kr.with_entries(kept))
}

/// [`kr_prune`], falling back to the single best entry (earliest on ties)
/// when pruning removes everything. The flag reports the fallback.
pub fn prune_or_best(kr: &KnowledgeRepository, theta_p: f64) -> Result<(KnowledgeRepository, bool)> {
    match kr_prune(kr, theta_p) {
        Ok(p) => Ok((p, false)),
        Err(Error::EmptyPrunedRepository { .. }) => {
            let mut best: Option<&KnowledgeEntry> = None;
            for e in &kr.entries {
                if best.is_none_or(|b| e.performance > b.performance) {
                    best = Some(e);
                }
            }
            let best = best.ok_or(Error::InsufficientSamples("repository is empty".into()))?;
            warn!("pruning at {theta_p} left no entries; keeping the best entry (p = {})", best.performance);
            Ok((kr.with_entries(vec![best.clone()]), true))
        }
        Err(e) => Err(e),
    }
}

/// Fit the design-prediction meta-learner used by OffMAR phase 2.
pub fn train_design_model(kr: &KnowledgeRepository, config: &RunConfig) -> Result<MetaLearnerModel> {
    if kr.is_empty() {
        return Err(Error::InsufficientSamples("phase 2 needs a non-empty repository".into()));
    }
    fit(
        config.meta_learner,
        &kr.design_matrix()?,
        &config.hyper,
        derive_seed(config.seed, u64::MAX),
    )
}

/// OffMAR phase 2: the meta-learner trained on `model` picks the design of
/// every timestep of the second fold. The design engine is never used.
pub fn offmar_phase2<A, X>(
    model: &MetaLearnerModel,
    config: &RunConfig,
    fold2: &LabeledDataset,
    app: &mut A,
    extractor: &mut X,
) -> Result<RunLog>
where
    A: ApplicationAlgorithm + ?Sized,
    X: MetaFeatureExtractor<A> + ?Sized,
{
    let (schema, feature_schema) = prepare(config, fold2, app, extractor)?;
    let start = Instant::now();
    let mut log = RunLog::default();
    for t in 0..=config.total_timesteps {
        let features = extractor.extract(app, fold2, t)?;
        features.check_width(&feature_schema)?;
        let mut design = model.predict_design(&features.values)?;
        if !schema.is_valid(&design) {
            warn!("t = {t}: predicted design is invalid; repairing");
            design = schema.repair(&design);
        }
        let performance = app.exec(&design, fold2, t)?;
        log.records.push(TimestepRecord {
            timestep: t,
            design,
            actual_performance: performance,
            predicted_performance: None,
            ga_invoked: false,
            elapsed_wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffmarOutput {
    pub phase1: RunOutput,
    pub pruned: KnowledgeRepository,
    /// Pruning removed everything and the best entry was kept instead.
    pub fell_back: bool,
    pub phase2: RunLog,
}

/// Both OffMAR phases: design every timestep of `fold1`, prune at
/// `theta_p`, train the design predictor, then run `fold2` with it.
pub fn offmar_run<A, X>(
    config: &RunConfig,
    fold1: &LabeledDataset,
    fold2: &LabeledDataset,
    app: &mut A,
    engine: &mut dyn DesignEngine,
    extractor: &mut X,
) -> Result<OffmarOutput>
where
    A: ApplicationAlgorithm + ?Sized,
    X: MetaFeatureExtractor<A> + ?Sized,
{
    let phase1 = offmar_phase1(config, fold1, app, engine, extractor)?;
    let (pruned, fell_back) = prune_or_best(&phase1.repository, config.theta_p)?;
    let model = train_design_model(&pruned, config)?;
    let phase2 = offmar_phase2(&model, config, fold2, app, extractor)?;
    Ok(OffmarOutput {
        phase1,
        pruned,
        fell_back,
        phase2,
    })
}
