//! Bounded real-vector differential evolution, DE/best/1/bin, maximizing.
//!
//! Every trial vector draws from its own RNG stream derived from
//! `(seed, generation, target)`, so runs are bit-for-bit reproducible however
//! the work is scheduled. Two schedules are offered:
//!
//! * [`Schedule::Immediate`]: classic DE; a winning trial replaces its parent
//!   at once and later trials of the same generation already see it.
//! * [`Schedule::Generational`]: all trials of a generation are built from
//!   the population as it stood at the start of the generation, scored
//!   concurrently, then selected in one serial pass. Converges more slowly per
//!   generation but parallelizes the fitness evaluations.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indices, Execution};

/// Initialization gives up when none of the first `NP` times this many
/// candidates is feasible.
pub const INIT_ATTEMPTS_PER_SLOT: usize = 50;

/// Hard cap on initialization draws, per population slot, once at least one
/// feasible candidate has been found.
pub const INIT_ATTEMPTS_CAP_PER_SLOT: usize = 1000;

const INIT_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Immediate,
    Generational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeConfig {
    /// Population size `NP`.
    pub population: usize,
    /// Crossover probability `CR`.
    pub crossover: f64,
    /// Mutation factor `F`.
    pub mutation: f64,
    pub generations: usize,
    /// Inclusive `[lo, hi]` per gene.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
    #[serde(default)]
    pub schedule: Schedule,
    /// Only affects initialization and the generational schedule.
    #[serde(default)]
    pub execution: Execution,
}

impl DeConfig {
    pub fn new(bounds: Vec<(f64, f64)>, population: usize, generations: usize, seed: u64) -> Self {
        DeConfig {
            population,
            crossover: 0.8,
            mutation: 0.7,
            generations,
            bounds,
            seed,
            schedule: Schedule::default(),
            execution: Execution::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::invalid("population", format!("need at least 4, got {}", self.population)));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::invalid("crossover", format!("must lie in [0, 1], got {}", self.crossover)));
        }
        if !(self.mutation > 0.0 && self.mutation <= 2.0) {
            return Err(Error::invalid("mutation", format!("must lie in (0, 2], got {}", self.mutation)));
        }
        if self.bounds.is_empty() {
            return Err(Error::invalid("bounds", "at least one gene is required"));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid("bounds", format!("gene {i}: need finite lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    /// Best fitness of the population, starting with the initial population.
    pub best_per_generation: Vec<f64>,
    pub best_genome: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations: usize,
    /// Infeasible candidates, initialization included.
    pub rejected: usize,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_genome(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()
}

struct Population {
    genomes: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    attempts: usize,
    rejected: usize,
}

/// Draws candidates in batches of `NP` until `NP` feasible ones are found.
/// Candidate `k` always uses the `k`-th block of the initialization stream,
/// so the accepted set does not depend on evaluation order.
fn initial_population<F>(cfg: &DeConfig, fitness: &F) -> Result<Population>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let np = cfg.population;
    let probe = np * INIT_ATTEMPTS_PER_SLOT;
    let limit = np * INIT_ATTEMPTS_CAP_PER_SLOT;
    let mut genomes = Vec::with_capacity(np);
    let mut values = Vec::with_capacity(np);
    let mut attempts = 0;
    let mut rejected = 0;
    while genomes.len() < np && attempts < limit {
        let batch = np.min(limit - attempts);
        let start = attempts;
        let scored = map_indices(cfg.execution, batch, |j| {
            let mut rng = stream_rng(cfg.seed, INIT_STREAM);
            rng.set_word_pos(((start + j) as u128) << 16);
            let g = random_genome(&mut rng, &cfg.bounds);
            let f = fitness(&g);
            (g, f)
        });
        for (g, f) in scored {
            attempts += 1;
            match f {
                Some(v) if !v.is_nan() && genomes.len() < np => {
                    genomes.push(g);
                    values.push(v);
                }
                Some(v) if !v.is_nan() => {}
                _ => rejected += 1,
            }
        }
        if genomes.is_empty() && attempts >= probe {
            break;
        }
    }
    if genomes.len() < np {
        return Err(Error::Initialization {
            required: np,
            accepted: genomes.len(),
            attempts,
        });
    }
    Ok(Population {
        genomes,
        fitness: values,
        attempts,
        rejected,
    })
}

/// `NP` genomes drawn uniformly within the bounds, all satisfying `feasible`.
pub fn sample_feasible_population<F>(cfg: &DeConfig, feasible: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    cfg.validate()?;
    let pop = initial_population(cfg, &|g: &[f64]| feasible(g).then_some(0.0))?;
    Ok(pop.genomes)
}

fn argmax(values: &[f64]) -> usize {
    // First maximum wins ties.
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn trial_vector(cfg: &DeConfig, pop: &[Vec<f64>], best: usize, target: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let np = pop.len();
    let dim = cfg.dimension();
    // r1 ≠ r2, both distinct from the best and the target.
    let excluded = if best == target { 1 } else { 2 };
    let pool = np - excluded;
    let picks = index::sample(rng, pool, 2);
    let map = |mut k: usize| {
        let (a, b) = if best < target { (best, target) } else { (target, best) };
        if k >= a {
            k += 1;
        }
        if excluded == 2 && k >= b {
            k += 1;
        }
        k
    };
    let (r1, r2) = (map(picks.index(0)), map(picks.index(1)));
    let forced = rng.random_range(0..dim);
    (0..dim)
        .map(|j| {
            let cross = j == forced || rng.random::<f64>() < cfg.crossover;
            let x = if cross {
                pop[best][j] + cfg.mutation * (pop[r1][j] - pop[r2][j])
            } else {
                pop[target][j]
            };
            let (lo, hi) = cfg.bounds[j];
            x.clamp(lo, hi)
        })
        .collect()
}

/// Maximizes `fitness` over the box `cfg.bounds`. `None` marks an infeasible
/// genome; it never replaces a feasible parent.
pub fn optimize<F>(fitness: F, cfg: &DeConfig) -> Result<OptimizationTrace>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    cfg.validate()?;
    let Population {
        mut genomes,
        fitness: mut values,
        mut attempts,
        mut rejected,
    } = initial_population(cfg, &fitness)?;
    let np = cfg.population;
    let mut best = argmax(&values);
    let mut history = Vec::with_capacity(cfg.generations + 1);
    history.push(values[best]);

    for generation in 0..cfg.generations {
        let rng_for = |target: usize| stream_rng(cfg.seed, ((generation as u64 + 1) << 32) | target as u64);
        match cfg.schedule {
            Schedule::Immediate => {
                for target in 0..np {
                    let trial = trial_vector(cfg, &genomes, best, target, &mut rng_for(target));
                    attempts += 1;
                    match fitness(&trial).filter(|v| !v.is_nan()) {
                        Some(v) if v >= values[target] => {
                            genomes[target] = trial;
                            values[target] = v;
                            best = argmax(&values);
                        }
                        Some(_) => {}
                        None => rejected += 1,
                    }
                }
            }
            Schedule::Generational => {
                let snapshot = &genomes;
                let trials = map_indices(cfg.execution, np, |target| {
                    let trial = trial_vector(cfg, snapshot, best, target, &mut rng_for(target));
                    let score = fitness(&trial).filter(|v| !v.is_nan());
                    (trial, score)
                });
                attempts += np;
                for (target, (trial, score)) in trials.into_iter().enumerate() {
                    match score {
                        Some(v) if v >= values[target] => {
                            genomes[target] = trial;
                            values[target] = v;
                        }
                        Some(_) => {}
                        None => rejected += 1,
                    }
                }
                best = argmax(&values);
            }
        }
        history.push(values[best]);
    }

    Ok(OptimizationTrace {
        best_per_generation: history,
        best_genome: genomes[best].clone(),
        best_fitness: values[best],
        evaluations: attempts,
        rejected,
    })
}
