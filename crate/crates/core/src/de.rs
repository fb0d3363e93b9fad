//! DE/rand/1/bin comparator.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    EventKind, GenerationCounters, Goal, Point, RunResult, SearchBox, TerminationReason,
    TraceEvent,
};
use crate::error::{Result, RmcError};
use crate::operators::improves;

/// Differential weight `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeWeight {
    Fixed(f64),
    /// Redrawn uniformly from `[low, high]` at the start of every generation.
    RandomPerGeneration { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    /// `None` means `10 * n`.
    pub population_size: Option<usize>,
    pub weight: DeWeight,
    pub crossover_cr: f64,
    pub max_generations: u64,
    /// Stop once the best fitness is at least as good as `target + tolerance`.
    pub target_value: Option<f64>,
    pub target_tolerance: f64,
    /// Stop once the population's fitness spread falls below this.
    pub convergence_spread: f64,
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population_size: None,
            weight: DeWeight::RandomPerGeneration {
                low: 0.4,
                high: 1.0,
            },
            crossover_cr: 0.9,
            max_generations: 2000,
            target_value: None,
            target_tolerance: 1e-3,
            convergence_spread: 1e-14,
            seed: 0,
        }
    }
}

impl DeConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_target(mut self, value: f64, tolerance: f64) -> Self {
        self.target_value = Some(value);
        self.target_tolerance = tolerance;
        self
    }

    pub fn population_for(&self, dimension: usize) -> usize {
        self.population_size.unwrap_or(10 * dimension)
    }

    pub fn validate(&self, dimension: usize) -> Result<()> {
        let np = self.population_for(dimension);
        if np < 4 {
            return Err(RmcError::Config(format!(
                "population size {np} is below 4; rand/1 needs three partners besides the target"
            )));
        }
        let weight_ok = |f: f64| f.is_finite() && f > 0.0 && f <= 2.0;
        match self.weight {
            DeWeight::Fixed(f) if !weight_ok(f) => {
                return Err(RmcError::Config(format!("weight {f} outside (0, 2]")));
            }
            DeWeight::RandomPerGeneration { low, high } if !(weight_ok(low) && weight_ok(high) && low <= high) => {
                return Err(RmcError::Config(format!("weight range [{low}, {high}] outside (0, 2]")));
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.crossover_cr) {
            return Err(RmcError::Config(format!("CR {} outside [0, 1]", self.crossover_cr)));
        }
        if self.max_generations == 0 {
            return Err(RmcError::Config("max_generations must be at least 1".into()));
        }
        if self.target_tolerance.is_nan() || self.target_tolerance < 0.0 {
            return Err(RmcError::Config("target tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

fn reached(best: f64, target: f64, tolerance: f64, goal: Goal) -> bool {
    match goal {
        Goal::Minimize => best <= target + tolerance,
        Goal::Maximize => best >= target - tolerance,
    }
}

/// Non-finite values rank last.
fn rank_value(v: f64, goal: Goal) -> f64 {
    if v.is_finite() {
        v
    } else {
        match goal {
            Goal::Minimize => f64::INFINITY,
            Goal::Maximize => f64::NEG_INFINITY,
        }
    }
}

fn best_index(fitness: &[f64], goal: Goal) -> usize {
    let mut best = 0;
    for (i, &v) in fitness.iter().enumerate().skip(1) {
        if improves(v, fitness[best], goal) || (!fitness[best].is_finite() && v.is_finite()) {
            best = i;
        }
    }
    best
}

/// Runs DE/rand/1/bin with bound clipping and greedy one-to-one selection.
///
/// `counters.tc` holds the number of generations executed; `trm` stays zero.
pub fn de_optimize<F>(
    mut objective: F,
    bounds: &SearchBox,
    goal: Goal,
    config: &DeConfig,
) -> Result<RunResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = bounds.dimension();
    config.validate(n)?;
    let np = config.population_for(n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluations = 0u64;

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|_| {
            (0..n)
                .map(|j| rng.random_range(bounds.lower()[j]..=bounds.upper()[j]))
                .collect()
        })
        .collect();
    let mut fitness: Vec<f64> = population
        .iter()
        .map(|x| {
            evaluations += 1;
            objective(x)
        })
        .collect();
    if fitness.iter().all(|v| !v.is_finite()) {
        return Err(RmcError::Initialization(
            "objective is non-finite on the whole initial population".into(),
        ));
    }

    let mut trajectory = Vec::new();
    let mut generation = 0u64;
    let snapshot = |generation: u64, population: &[Vec<f64>], fitness: &[f64]| {
        let b = best_index(fitness, goal);
        TraceEvent {
            generation,
            event: EventKind::Generation,
            point: population[b].clone(),
            fitness: fitness[b],
        }
    };
    trajectory.push(snapshot(0, &population, &fitness));

    let reason = loop {
        let b = best_index(&fitness, goal);
        if let Some(target) = config.target_value {
            if reached(fitness[b], target, config.target_tolerance, goal) {
                break TerminationReason::TargetReached;
            }
        }
        let (lo, hi) = fitness.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            let v = rank_value(v, goal);
            (lo.min(v), hi.max(v))
        });
        if generation > 0 && (hi - lo) <= config.convergence_spread {
            break TerminationReason::PopulationConverged;
        }
        if generation >= config.max_generations {
            break TerminationReason::GenerationCap;
        }

        let weight = match config.weight {
            DeWeight::Fixed(f) => f,
            DeWeight::RandomPerGeneration { low, high } => rng.random_range(low..=high),
        };
        let mut next_population = population.clone();
        let mut next_fitness = fitness.clone();
        for i in 0..np {
            // three distinct partners, none equal to the target
            let picks = sample(&mut rng, np - 1, 3);
            let partner = |k: usize| {
                let idx = picks.index(k);
                if idx >= i {
                    idx + 1
                } else {
                    idx
                }
            };
            let (r1, r2, r3) = (partner(0), partner(1), partner(2));
            let forced = rng.random_range(0..n);
            let trial: Vec<f64> = (0..n)
                .map(|j| {
                    if j == forced || rng.random::<f64>() < config.crossover_cr {
                        let v = population[r1][j] + weight * (population[r2][j] - population[r3][j]);
                        v.clamp(bounds.lower()[j], bounds.upper()[j])
                    } else {
                        population[i][j]
                    }
                })
                .collect();
            evaluations += 1;
            let value = objective(&trial);
            let keep_old = improves(fitness[i], value, goal)
                || (!value.is_finite() && fitness[i].is_finite());
            if !keep_old {
                next_population[i] = trial;
                next_fitness[i] = value;
            }
        }
        population = next_population;
        fitness = next_fitness;
        generation += 1;
        trajectory.push(snapshot(generation, &population, &fitness));
    };

    let b = best_index(&fitness, goal);
    Ok(RunResult {
        best_point: Point::with_fitness(population[b].clone(), fitness[b]),
        best_fitness: fitness[b],
        counters: GenerationCounters {
            trm: 0,
            tc: generation,
        },
        termination_reason: reason,
        evaluations,
        trajectory,
        boxes: vec![bounds.clone()],
    })
}
