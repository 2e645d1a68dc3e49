use serde::{Deserialize, Serialize};

use crate::design::{Design, Gene, GeneSchema, GeneSpec};
use crate::distance::Metric;
use crate::error::{Error, Result};

pub const SCHEMA_ID: &str = "iterative-clustering-v1";
pub const K_MIN: usize = 2;
pub const K_MAX: usize = 10;
pub const ETA_MIN: f64 = 0.01;
pub const ETA_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    UniformRandom,
    SamplePoints,
    SpreadMaximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignRule {
    HardNearest,
    SoftmaxWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    Mean,
    Median,
    OnlineEta,
}

const INITS: [Init; 3] = [Init::UniformRandom, Init::SamplePoints, Init::SpreadMaximal];
const ASSIGNS: [AssignRule; 2] = [AssignRule::HardNearest, AssignRule::SoftmaxWeighted];
const UPDATES: [UpdateRule; 3] = [UpdateRule::Mean, UpdateRule::Median, UpdateRule::OnlineEta];

/// Gene schema of the composable clustering algorithm:
/// distance measure, centroid initialisation, assignment rule, centroid
/// update, number of clusters and learning rate.
pub fn cluster_design_schema() -> GeneSchema {
    GeneSchema::new(
        SCHEMA_ID,
        vec![
            GeneSpec::categorical(
                "distance",
                &["euclidean", "manhattan", "cosine", "minkowski_p3"],
            ),
            GeneSpec::categorical("init", &["uniform_random", "sample_points", "spread_maximal"]),
            GeneSpec::categorical("assignment", &["hard_nearest", "softmax_weighted"]),
            GeneSpec::categorical("update", &["mean", "median", "online_eta"]),
            GeneSpec::integer("k", K_MIN as i64, K_MAX as i64),
            GeneSpec::real("eta", ETA_MIN, ETA_MAX),
        ],
    )
    .expect("static schema is well formed")
}

/// Typed view of a design under [`cluster_design_schema`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterDesign {
    pub metric: Metric,
    pub init: Init,
    pub assignment: AssignRule,
    pub update: UpdateRule,
    pub k: usize,
    pub eta: f64,
}

impl ClusterDesign {
    pub fn decode(design: &Design) -> Result<Self> {
        cluster_design_schema().validate(design)?;
        let g = &design.genes;
        let choice = |i: usize| g[i].as_choice().unwrap();
        Ok(ClusterDesign {
            metric: Metric::ALL[choice(0)],
            init: INITS[choice(1)],
            assignment: ASSIGNS[choice(2)],
            update: UPDATES[choice(3)],
            k: g[4].as_value().unwrap() as usize,
            eta: g[5].as_value().unwrap(),
        })
    }

    pub fn encode(&self) -> Design {
        let pos = |found: Option<usize>| found.expect("variant is listed");
        Design::new(
            SCHEMA_ID,
            vec![
                Gene::Choice(pos(Metric::ALL.iter().position(|m| *m == self.metric))),
                Gene::Choice(pos(INITS.iter().position(|m| *m == self.init))),
                Gene::Choice(pos(ASSIGNS.iter().position(|m| *m == self.assignment))),
                Gene::Choice(pos(UPDATES.iter().position(|m| *m == self.update))),
                Gene::Value(self.k as f64),
                Gene::Value(self.eta),
            ],
        )
    }

    /// Plain Lloyd iteration: Euclidean, hard nearest, mean update.
    pub fn lloyd(k: usize) -> Self {
        ClusterDesign {
            metric: Metric::Euclidean,
            init: Init::SamplePoints,
            assignment: AssignRule::HardNearest,
            update: UpdateRule::Mean,
            k,
            eta: 0.1,
        }
    }

    pub fn checked(self) -> Result<Self> {
        if !(K_MIN..=K_MAX).contains(&self.k) || !(ETA_MIN..=ETA_MAX).contains(&self.eta) {
            return Err(Error::InvalidDesign {
                schema: SCHEMA_ID.into(),
                reason: format!("k = {} or eta = {} out of range", self.k, self.eta),
            });
        }
        Ok(self)
    }
}
