//! Genetic-algorithm design engine: tournament selection, single-point
//! crossover and per-gene mutation over [`Design`] chromosomes.

use std::collections::HashMap;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::design::{Design, Gene, GeneSchema};
use crate::error::{Error, Result};
use crate::rng::Rng as StdRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Probability that a gene of a mutated individual is re-sampled.
    /// `None` means `1 / chromosome length`.
    pub per_gene_mutation_prob: Option<f64>,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 70,
            generations: 50,
            crossover_rate: 0.75,
            mutation_rate: 0.25,
            tournament_size: 2,
            per_gene_mutation_prob: None,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let rate = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {v} not in [0, 1]")))
            }
        };
        rate("crossover_rate", self.crossover_rate)?;
        rate("mutation_rate", self.mutation_rate)?;
        if let Some(p) = self.per_gene_mutation_prob {
            rate("per_gene_mutation_prob", p)?;
        }
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population_size must be >= 2".into()));
        }
        if self.tournament_size < 1 {
            return Err(Error::InvalidConfig("tournament_size must be >= 1".into()));
        }
        Ok(())
    }

    fn gene_prob(&self, len: usize) -> f64 {
        self.per_gene_mutation_prob
            .unwrap_or(1.0 / len.max(1) as f64)
    }
}

/// Result of one [`evolve`] call.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub best: Design,
    pub best_fitness: f64,
    pub population: Vec<Design>,
    /// Best-ever fitness after initialisation and after every generation.
    pub best_history: Vec<f64>,
}

/// Sample `tournament_size` individuals with replacement and return the index
/// of the fittest. Ties go to the lowest population index.
pub fn tournament_select<R: Rng + ?Sized>(
    fitnesses: &[f64],
    tournament_size: usize,
    rng: &mut R,
) -> usize {
    assert!(!fitnesses.is_empty(), "tournament over an empty population");
    let mut best: Option<usize> = None;
    for _ in 0..tournament_size.max(1) {
        let i = rng.random_range(0..fitnesses.len());
        best = match best {
            None => Some(i),
            Some(b) if fitnesses[i] > fitnesses[b] || (fitnesses[i] == fitnesses[b] && i < b) => {
                Some(i)
            }
            keep => keep,
        };
    }
    best.unwrap()
}

/// Swap the tails of `a` and `b` from a uniformly chosen point in
/// `1..len`. Chromosomes shorter than two genes are returned unchanged.
pub fn single_point_crossover<R: Rng + ?Sized>(
    a: &Design,
    b: &Design,
    rng: &mut R,
) -> (Design, Design) {
    let len = a.genes.len().min(b.genes.len());
    if len < 2 {
        return (a.clone(), b.clone());
    }
    let point = rng.random_range(1..len);
    crossover_at(a, b, point)
}

/// Crossover at a fixed point: `a[..point] + b[point..]` and
/// `b[..point] + a[point..]`.
pub fn crossover_at(a: &Design, b: &Design, point: usize) -> (Design, Design) {
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    c1.genes[point..].copy_from_slice(&b.genes[point..]);
    c2.genes[point..].copy_from_slice(&a.genes[point..]);
    (c1, c2)
}

/// Re-sample each gene from its domain with probability `per_gene_prob`.
pub fn mutate<R: Rng + ?Sized>(
    design: &Design,
    schema: &GeneSchema,
    per_gene_prob: f64,
    rng: &mut R,
) -> Design {
    let mut out = design.clone();
    for (gene, spec) in out.genes.iter_mut().zip(&schema.genes) {
        if rng.random::<f64>() < per_gene_prob {
            *gene = spec.sample(rng);
        }
    }
    out
}

fn score<F>(fitness_fn: &F, d: &Design) -> f64
where
    F: Fn(&Design) -> f64 + ?Sized,
{
    let f = fitness_fn(d);
    if f.is_finite() && (0.0..=1.0).contains(&f) {
        f
    } else {
        warn!("fitness function returned {f} for {:?}; scoring 0", d.genes);
        0.0
    }
}

/// Run the GA for `params.generations` generations and return the best-ever
/// design together with the final population.
///
/// A warm-start population is truncated or topped up with random individuals
/// to `population_size`. One elite (the current best) survives each
/// generation unchanged.
pub fn evolve<F>(
    schema: &GeneSchema,
    fitness_fn: &F,
    params: &GaParams,
    rng: &mut StdRng,
    warm_start: Option<&[Design]>,
) -> Result<Evolution>
where
    F: Fn(&Design) -> f64 + ?Sized,
{
    params.validate()?;
    let size = params.population_size;
    let gene_prob = params.gene_prob(schema.len());

    let mut population: Vec<Design> = warm_start
        .unwrap_or(&[])
        .iter()
        .filter(|d| schema.is_valid(d))
        .take(size)
        .cloned()
        .collect();
    while population.len() < size {
        population.push(schema.sample(rng));
    }
    // fitness_fn is pure, so repeated chromosomes are scored once per call
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut fitnesses: Vec<f64> = population
        .iter()
        .map(|d| cached_score(&mut cache, fitness_fn, d))
        .collect();

    let first_best = argmax(&fitnesses);
    let mut best = population[first_best].clone();
    let mut best_fitness = fitnesses[first_best];
    let mut best_history = vec![best_fitness];

    for _ in 0..params.generations {
        let elite = argmax(&fitnesses);
        let mut next = Vec::with_capacity(size);
        let mut next_fit = Vec::with_capacity(size);
        next.push(population[elite].clone());
        next_fit.push(fitnesses[elite]);

        while next.len() < size {
            let a = tournament_select(&fitnesses, params.tournament_size, rng);
            let b = tournament_select(&fitnesses, params.tournament_size, rng);
            let (c1, c2) = if rng.random::<f64>() < params.crossover_rate {
                single_point_crossover(&population[a], &population[b], rng)
            } else {
                (population[a].clone(), population[b].clone())
            };
            for child in [c1, c2] {
                if next.len() == size {
                    break;
                }
                let child = if rng.random::<f64>() < params.mutation_rate {
                    mutate(&child, schema, gene_prob, rng)
                } else {
                    child
                };
                if let Err(e) = schema.validate(&child) {
                    return Err(Error::Engine(format!("operator produced invalid child: {e}")));
                }
                next_fit.push(cached_score(&mut cache, fitness_fn, &child));
                next.push(child);
            }
        }

        population = next;
        fitnesses = next_fit;
        let gen_best = argmax(&fitnesses);
        if fitnesses[gen_best] > best_fitness {
            best_fitness = fitnesses[gen_best];
            best = population[gen_best].clone();
        }
        best_history.push(best_fitness);
    }

    Ok(Evolution {
        best,
        best_fitness,
        population,
        best_history,
    })
}

fn gene_key(design: &Design) -> Vec<u64> {
    design
        .genes
        .iter()
        .map(|g| match g {
            Gene::Choice(c) => *c as u64,
            Gene::Value(v) => v.to_bits(),
        })
        .collect()
}

fn cached_score<F>(cache: &mut HashMap<Vec<u64>, f64>, fitness_fn: &F, design: &Design) -> f64
where
    F: Fn(&Design) -> f64 + ?Sized,
{
    *cache
        .entry(gene_key(design))
        .or_insert_with(|| score(fitness_fn, design))
}

/// First index of the maximum.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Design engine backed by [`evolve`], carrying its final population over to
/// the next invocation.
#[derive(Debug, Clone)]
pub struct GaEngine {
    pub params: GaParams,
    pub warm_start: bool,
    rng: StdRng,
    population: Option<Vec<Design>>,
    invocations: usize,
}

impl GaEngine {
    pub fn new(params: GaParams, seed: u64) -> Self {
        GaEngine {
            params,
            warm_start: true,
            rng: crate::rng::child_rng(seed, crate::rng::Stream::DesignEngine),
            population: None,
            invocations: 0,
        }
    }

    pub fn invocations(&self) -> usize {
        self.invocations
    }
}

impl crate::controller::DesignEngine for GaEngine {
    fn reset(&mut self, seed: u64) {
        self.rng = crate::rng::child_rng(seed, crate::rng::Stream::DesignEngine);
        self.population = None;
        self.invocations = 0;
    }

    fn create_design(
        &mut self,
        schema: &GeneSchema,
        fitness: &dyn Fn(&Design) -> f64,
        _t: usize,
    ) -> Result<Design> {
        let warm = if self.warm_start {
            self.population.as_deref()
        } else {
            None
        };
        let evo = evolve(schema, fitness, &self.params, &mut self.rng, warm)?;
        self.population = Some(evo.population);
        self.invocations += 1;
        Ok(evo.best)
    }
}
