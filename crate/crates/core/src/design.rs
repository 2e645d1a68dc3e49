//! Gene schemas and the designs (chromosomes) that conform to them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Descriptor of a single gene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneSpec {
    /// Choice of technique for one algorithmic component.
    Categorical { name: String, options: Vec<String> },
    /// Bounded hyper-parameter. Integer genes hold whole numbers in `[lo, hi]`.
    Numeric {
        name: String,
        lo: f64,
        hi: f64,
        integer: bool,
    },
}

impl GeneSpec {
    pub fn categorical(name: &str, options: &[&str]) -> Self {
        GeneSpec::Categorical {
            name: name.to_owned(),
            options: options.iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    pub fn real(name: &str, lo: f64, hi: f64) -> Self {
        GeneSpec::Numeric {
            name: name.to_owned(),
            lo,
            hi,
            integer: false,
        }
    }

    pub fn integer(name: &str, lo: i64, hi: i64) -> Self {
        GeneSpec::Numeric {
            name: name.to_owned(),
            lo: lo as f64,
            hi: hi as f64,
            integer: true,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            GeneSpec::Categorical { name, .. } | GeneSpec::Numeric { name, .. } => name,
        }
    }

    /// Uniformly sample a value from this gene's domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Gene {
        match self {
            GeneSpec::Categorical { options, .. } => Gene::Choice(rng.random_range(0..options.len())),
            GeneSpec::Numeric {
                lo, hi, integer, ..
            } => {
                if *integer {
                    Gene::Value(rng.random_range((*lo as i64)..=(*hi as i64)) as f64)
                } else if lo == hi {
                    Gene::Value(*lo)
                } else {
                    Gene::Value(rng.random_range(*lo..=*hi))
                }
            }
        }
    }

    fn check(&self, gene: &Gene) -> std::result::Result<(), String> {
        match (self, gene) {
            (GeneSpec::Categorical { name, options }, Gene::Choice(i)) => {
                if *i < options.len() {
                    Ok(())
                } else {
                    Err(format!("gene `{name}`: option {i} out of {}", options.len()))
                }
            }
            (
                GeneSpec::Numeric {
                    name,
                    lo,
                    hi,
                    integer,
                },
                Gene::Value(v),
            ) => {
                if !v.is_finite() || *v < *lo || *v > *hi {
                    Err(format!("gene `{name}`: {v} outside [{lo}, {hi}]"))
                } else if *integer && v.fract() != 0.0 {
                    Err(format!("gene `{name}`: {v} is not an integer"))
                } else {
                    Ok(())
                }
            }
            (spec, gene) => Err(format!(
                "gene `{}`: kind mismatch ({gene:?})",
                spec.name()
            )),
        }
    }

    fn repair(&self, gene: &Gene) -> Gene {
        match self {
            GeneSpec::Categorical { options, .. } => {
                let idx = match gene {
                    Gene::Choice(i) => *i,
                    Gene::Value(v) if v.is_finite() && *v > 0.0 => v.round() as usize,
                    Gene::Value(_) => 0,
                };
                Gene::Choice(idx.min(options.len() - 1))
            }
            GeneSpec::Numeric {
                lo, hi, integer, ..
            } => {
                let raw = match gene {
                    Gene::Value(v) if v.is_finite() => *v,
                    Gene::Value(_) => *lo,
                    Gene::Choice(i) => *i as f64,
                };
                let v = raw.clamp(*lo, *hi);
                Gene::Value(if *integer { v.round().clamp(*lo, *hi) } else { v })
            }
        }
    }

    /// Width of this gene in the meta-learner input encoding.
    fn encoded_width(&self) -> usize {
        match self {
            GeneSpec::Categorical { options, .. } => options.len(),
            GeneSpec::Numeric { .. } => 1,
        }
    }
}

/// A gene value: categorical option index or numeric value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gene {
    Choice(usize),
    Value(f64),
}

impl Gene {
    pub fn as_choice(&self) -> Option<usize> {
        match self {
            Gene::Choice(i) => Some(*i),
            Gene::Value(_) => None,
        }
    }

    pub fn as_value(&self) -> Option<f64> {
        match self {
            Gene::Value(v) => Some(*v),
            Gene::Choice(_) => None,
        }
    }
}

/// Ordered gene descriptors plus an identifier that designs refer back to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneSchema {
    pub id: String,
    pub genes: Vec<GeneSpec>,
}

impl GeneSchema {
    pub fn new(id: impl Into<String>, genes: Vec<GeneSpec>) -> Result<Self> {
        let schema = GeneSchema {
            id: id.into(),
            genes,
        };
        schema.check()?;
        Ok(schema)
    }

    fn check(&self) -> Result<()> {
        if self.genes.is_empty() {
            return Err(Error::InvalidSchema("schema has no genes".into()));
        }
        for g in &self.genes {
            match g {
                GeneSpec::Categorical { name, options } if options.is_empty() => {
                    return Err(Error::InvalidSchema(format!(
                        "categorical gene `{name}` has no options"
                    )))
                }
                GeneSpec::Numeric { name, lo, hi, .. } if !(lo <= hi) => {
                    return Err(Error::InvalidSchema(format!(
                        "numeric gene `{name}` has lo > hi"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Design {
        Design {
            schema_id: self.id.clone(),
            genes: self.genes.iter().map(|g| g.sample(rng)).collect(),
        }
    }

    pub fn validate(&self, design: &Design) -> Result<()> {
        let fail = |reason: String| Error::InvalidDesign {
            schema: self.id.clone(),
            reason,
        };
        if design.schema_id != self.id {
            return Err(fail(format!("schema id `{}`", design.schema_id)));
        }
        if design.genes.len() != self.genes.len() {
            return Err(fail(format!(
                "{} genes, schema declares {}",
                design.genes.len(),
                self.genes.len()
            )));
        }
        for (spec, gene) in self.genes.iter().zip(&design.genes) {
            spec.check(gene).map_err(fail)?;
        }
        Ok(())
    }

    pub fn is_valid(&self, design: &Design) -> bool {
        self.validate(design).is_ok()
    }

    /// Clamp numeric genes into bounds and snap categorical genes to the
    /// nearest existing option. Missing genes take the first option or the
    /// lower bound.
    pub fn repair(&self, design: &Design) -> Design {
        let genes = self
            .genes
            .iter()
            .enumerate()
            .map(|(i, spec)| match design.genes.get(i) {
                Some(g) => spec.repair(g),
                None => spec.repair(&Gene::Value(f64::NAN)),
            })
            .collect();
        Design {
            schema_id: self.id.clone(),
            genes,
        }
    }

    pub fn encoded_width(&self) -> usize {
        self.genes.iter().map(GeneSpec::encoded_width).sum()
    }

    /// One-hot categorical genes, min-max scaled numeric genes.
    pub fn encode(&self, design: &Design) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.encoded_width());
        for (spec, gene) in self.genes.iter().zip(&design.genes) {
            match spec {
                GeneSpec::Categorical { options, .. } => {
                    let idx = gene.as_choice().unwrap_or(usize::MAX);
                    out.extend((0..options.len()).map(|o| if o == idx { 1.0 } else { 0.0 }));
                }
                GeneSpec::Numeric { lo, hi, .. } => {
                    let v = gene.as_value().unwrap_or(*lo);
                    out.push(if hi > lo { (v - lo) / (hi - lo) } else { 0.0 });
                }
            }
        }
        out
    }
}

/// An ordered set of component choices and hyper-parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub schema_id: String,
    pub genes: Vec<Gene>,
}

impl Design {
    pub fn new(schema_id: impl Into<String>, genes: Vec<Gene>) -> Self {
        Design {
            schema_id: schema_id.into(),
            genes,
        }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Bitwise identity, so designs can be used as class labels.
    pub fn same_as(&self, other: &Design) -> bool {
        self.schema_id == other.schema_id
            && self.genes.len() == other.genes.len()
            && self.genes.iter().zip(&other.genes).all(|(a, b)| match (a, b) {
                (Gene::Choice(x), Gene::Choice(y)) => x == y,
                (Gene::Value(x), Gene::Value(y)) => x.to_bits() == y.to_bits(),
                _ => false,
            })
    }
}
