use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::operators::{crossover, mutate, reproduce, selection_probabilities};
use super::{evaluate_fitness, EvaluatedIndividual, GaConfig, GenerationRecord, RunReport};
use crate::error::Result;
use crate::network::DesignVector;
use crate::problem::Problem;

/// Generational GA with roulette reproduction, pairwise single-point
/// crossover and per-gene mutation. The global best lives outside the
/// population; there is no elitism.
///
/// All random numbers come from one ChaCha8 stream seeded with
/// `config.seed` and are drawn before a generation is evaluated, so turning
/// on parallel evaluation never changes the report.
#[derive(Debug, Clone)]
pub struct GeneticAlgorithm<'a> {
    problem: &'a Problem,
    config: GaConfig,
    parallel: bool,
}

impl<'a> GeneticAlgorithm<'a> {
    pub fn new(problem: &'a Problem, config: GaConfig) -> Self {
        Self {
            problem,
            config,
            parallel: false,
        }
    }

    /// Evaluate each generation on the rayon thread pool.
    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    pub fn run(&self) -> Result<RunReport> {
        self.run_with_observer(|_, _| {})
    }

    /// Runs the GA, calling `observer` with every generation's record and population.
    pub fn run_with_observer<F>(&self, mut observer: F) -> Result<RunReport>
    where
        F: FnMut(&GenerationRecord, &[EvaluatedIndividual]),
    {
        let start = Instant::now();
        let config = &self.config;
        config.validate()?;
        let catalog = self.problem.catalog();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let initial: Vec<DesignVector> = (0..config.population_size)
            .map(|_| {
                (0..self.problem.pipe_count())
                    .map(|_| rng.random_range(0..catalog.len()))
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        let mut population = self.evaluate_all(initial)?;
        let mut best = population[0].clone();
        let mut best_feasible = None;
        update_best(&mut best, &mut best_feasible, &population);

        let mut history = Vec::with_capacity(config.max_generations);
        for generation in 1..=config.max_generations {
            let fitnesses: Vec<f64> = population.iter().map(|i| i.fitness).collect();
            let probabilities = selection_probabilities(&fitnesses)?;
            let designs: Vec<DesignVector> = population.iter().map(|i| i.design.clone()).collect();
            let pool = reproduce(&designs, &probabilities, &mut rng)?;

            let mut offspring = Vec::with_capacity(pool.len());
            for pair in pool.chunks(2) {
                let (a, b) = crossover(&pair[0], &pair[1], config.crossover_probability, &mut rng)?;
                offspring.push(a);
                offspring.push(b);
            }
            let offspring = offspring
                .iter()
                .map(|d| mutate(d, config.mutation_probability, catalog, &mut rng))
                .collect::<Result<Vec<_>>>()?;

            population = self.evaluate_all(offspring)?;
            update_best(&mut best, &mut best_feasible, &population);

            let record = GenerationRecord {
                generation,
                best_cost: best.penalized_cost(),
                best_fitness: best.fitness,
                n_feasible: population.iter().filter(|i| i.feasible).count(),
            };
            observer(&record, &population);
            history.push(record);
        }

        Ok(RunReport {
            best,
            best_feasible,
            history,
            config: config.clone(),
            elapsed: start.elapsed(),
        })
    }

    fn evaluate_all(&self, designs: Vec<DesignVector>) -> Result<Vec<EvaluatedIndividual>> {
        let npf = self.config.nodal_penalty_factor;
        let ppf = self.config.pipe_penalty_factor;
        let eval = |d: &DesignVector| evaluate_fitness(self.problem, d, npf, ppf);
        if self.parallel {
            designs.par_iter().map(eval).collect()
        } else {
            designs.iter().map(eval).collect()
        }
    }
}

/// Replaces `best` only on a strictly lower penalized cost and
/// `best_feasible` only on a strictly lower feasible cost; the first
/// occurrence wins ties.
fn update_best(
    best: &mut EvaluatedIndividual,
    best_feasible: &mut Option<EvaluatedIndividual>,
    population: &[EvaluatedIndividual],
) {
    for candidate in population {
        if candidate.penalized_cost() < best.penalized_cost() {
            *best = candidate.clone();
        }
        if candidate.feasible && best_feasible.as_ref().is_none_or(|b| candidate.cost < b.cost) {
            *best_feasible = Some(candidate.clone());
        }
    }
}

pub fn run_ga(problem: &Problem, config: GaConfig) -> Result<RunReport> {
    GeneticAlgorithm::new(problem, config).run()
}
