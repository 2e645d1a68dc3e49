//! Meta-learners: kNN, random forest and gradient-boosted trees. Each can
//! regress performance from (meta-features, design) or predict a stored
//! design from meta-features.

mod forest;
mod gbt;
mod knn;
mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::design::{Design, GeneSchema};
use crate::error::{Error, Result};
use crate::rng::indexed_rng;

pub use forest::{Forest, ForestParams};
pub use gbt::{Gbt, GbtOneVsRest, GbtParams};
pub use knn::KnnModel;
pub use tree::{fit_tree, Node, Task, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Knn,
    Rf,
    Gbt,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 3] = [LearnerKind::Knn, LearnerKind::Rf, LearnerKind::Gbt];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Knn => "knn",
            LearnerKind::Rf => "rf",
            LearnerKind::Gbt => "gbt",
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn" => Ok(LearnerKind::Knn),
            "rf" => Ok(LearnerKind::Rf),
            "gbt" => Ok(LearnerKind::Gbt),
            other => Err(Error::InvalidConfig(format!("unknown meta-learner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RegressPerformance,
    PredictDesign,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::RegressPerformance => "regress_performance",
            Mode::PredictDesign => "predict_design",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub knn_k: usize,
    pub forest: ForestParams,
    pub gbt: GbtParams,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            knn_k: 5,
            forest: ForestParams::default(),
            gbt: GbtParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Performance(Vec<f64>),
    /// Index into `designs` per row; `designs` holds each distinct design
    /// once, in order of first appearance.
    Design { classes: Vec<usize>, designs: Vec<Design> },
}

/// Training rows and targets. Performance rows are meta-features followed by
/// the design encoding; design rows are meta-features only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMatrix {
    pub rows: Vec<Vec<f64>>,
    pub target: Target,
    /// Schema used to encode designs into performance rows.
    pub design_schema: Option<GeneSchema>,
}

impl TrainingMatrix {
    pub fn for_performance<'a>(
        schema: &GeneSchema,
        samples: impl IntoIterator<Item = (&'a [f64], &'a Design, f64)>,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        let mut targets = Vec::new();
        for (features, design, perf) in samples {
            if !(0.0..=1.0).contains(&perf) {
                return Err(Error::InvalidConfig(format!("performance {perf} outside [0, 1]")));
            }
            rows.push(performance_row(schema, features, design)?);
            targets.push(perf);
        }
        let m = TrainingMatrix {
            rows,
            target: Target::Performance(targets),
            design_schema: Some(schema.clone()),
        };
        m.check()?;
        Ok(m)
    }

    pub fn for_designs<'a>(samples: impl IntoIterator<Item = (&'a [f64], &'a Design)>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        let mut designs: Vec<Design> = Vec::new();
        for (features, design) in samples {
            let id = match designs.iter().position(|d| d.same_as(design)) {
                Some(i) => i,
                None => {
                    designs.push(design.clone());
                    designs.len() - 1
                }
            };
            rows.push(features.to_vec());
            classes.push(id);
        }
        let m = TrainingMatrix {
            rows,
            target: Target::Design { classes, designs },
            design_schema: None,
        };
        m.check()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn check(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InsufficientSamples("meta-learner needs at least one row".into()));
        }
        let w = self.width();
        if let Some(r) = self.rows.iter().find(|r| r.len() != w) {
            return Err(Error::FeatureWidth {
                expected: w,
                got: r.len(),
            });
        }
        Ok(())
    }
}

fn performance_row(schema: &GeneSchema, features: &[f64], design: &Design) -> Result<Vec<f64>> {
    schema.validate(design)?;
    let mut row = features.to_vec();
    row.extend(schema.encode(design));
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Fitted {
    Knn(KnnModel),
    Forest(Forest),
    Gbt(Gbt),
    GbtOneVsRest(GbtOneVsRest),
}

/// A fitted meta-learner. Immutable after fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaLearnerModel {
    pub kind: LearnerKind,
    pub mode: Mode,
    pub hyper: Hyper,
    /// Width of the meta-feature part of a query.
    pub feature_width: usize,
    pub design_schema: Option<GeneSchema>,
    pub designs: Vec<Design>,
    pub fitted: Fitted,
}

/// Fit a meta-learner; the mode follows from the target kind.
pub fn fit(kind: LearnerKind, data: &TrainingMatrix, hyper: &Hyper, seed: u64) -> Result<MetaLearnerModel> {
    data.check()?;
    let mut rng = indexed_rng(seed, crate::rng::Stream::MetaLearner as u64);
    let x = &data.rows;
    let (mode, designs, fitted) = match &data.target {
        Target::Performance(y) => {
            let fitted = match kind {
                LearnerKind::Knn => Fitted::Knn(KnnModel::fit(x, y, hyper.knn_k)),
                LearnerKind::Rf => Fitted::Forest(Forest::fit(x, y, &hyper.forest, Task::Regression, &mut rng)),
                LearnerKind::Gbt => Fitted::Gbt(Gbt::fit(x, y, &hyper.gbt, &mut rng)),
            };
            (Mode::RegressPerformance, Vec::new(), fitted)
        }
        Target::Design { classes, designs } => {
            let n_classes = designs.len();
            let y: Vec<f64> = classes.iter().map(|&c| c as f64).collect();
            let fitted = match kind {
                LearnerKind::Knn => Fitted::Knn(KnnModel::fit(x, &y, hyper.knn_k)),
                LearnerKind::Rf => Fitted::Forest(Forest::fit(
                    x,
                    &y,
                    &hyper.forest,
                    Task::Classification { n_classes },
                    &mut rng,
                )),
                LearnerKind::Gbt => {
                    Fitted::GbtOneVsRest(GbtOneVsRest::fit(x, classes, n_classes, &hyper.gbt, &mut rng))
                }
            };
            (Mode::PredictDesign, designs.clone(), fitted)
        }
    };
    let feature_width = match (&data.design_schema, mode) {
        (Some(s), Mode::RegressPerformance) => data.width() - s.encoded_width(),
        _ => data.width(),
    };
    Ok(MetaLearnerModel {
        kind,
        mode,
        hyper: *hyper,
        feature_width,
        design_schema: data.design_schema.clone(),
        designs,
        fitted,
    })
}

impl MetaLearnerModel {
    fn check_width(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.feature_width {
            return Err(Error::FeatureWidth {
                expected: self.feature_width,
                got: features.len(),
            });
        }
        Ok(())
    }

    /// Predicted performance of `design` under `features`, clamped to [0, 1].
    pub fn predict_performance(&self, features: &[f64], design: &Design) -> Result<f64> {
        if self.mode != Mode::RegressPerformance {
            return Err(Error::WrongMode {
                actual: self.mode.name(),
                requested: Mode::RegressPerformance.name(),
            });
        }
        self.check_width(features)?;
        let schema = self.design_schema.as_ref().expect("regression models carry a schema");
        let row = performance_row(schema, features, design)?;
        let raw = match &self.fitted {
            Fitted::Knn(m) => m.predict_mean(&row),
            Fitted::Forest(m) => m.predict(&row),
            Fitted::Gbt(m) => m.predict(&row),
            Fitted::GbtOneVsRest(_) => unreachable!("classification model in regression mode"),
        };
        Ok(if raw.is_finite() { raw.clamp(0.0, 1.0) } else { 0.0 })
    }

    /// The stored design predicted for `features`.
    pub fn predict_design(&self, features: &[f64]) -> Result<Design> {
        if self.mode != Mode::PredictDesign {
            return Err(Error::WrongMode {
                actual: self.mode.name(),
                requested: Mode::PredictDesign.name(),
            });
        }
        self.check_width(features)?;
        let class = match &self.fitted {
            Fitted::Knn(m) => m.predict_vote(features) as usize,
            Fitted::Forest(m) => m.predict(features) as usize,
            Fitted::GbtOneVsRest(m) => m.predict(features),
            Fitted::Gbt(_) => unreachable!("regression model in design mode"),
        };
        Ok(self.designs[class].clone())
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
