//! Penalty-based genetic algorithm over catalog indices.
//!
//! Fitness is `100 000 / (NP + PP + cost)` where `NP` and `PP` are the nodal
//! and pipe penalties: the summed head deficit times the nodal penalty factor
//! and the summed gradient excess times the pipe penalty factor.

mod engine;
pub mod operators;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use engine::{run_ga, GeneticAlgorithm};
pub use operators::{crossover, mutate, reproduce, selection_probabilities};

use crate::error::{Error, Result};
use crate::network::DesignVector;
use crate::problem::Problem;

/// Numerator of the fitness function.
pub const FITNESS_SCALE: f64 = 100_000.0;

pub const DEFAULT_NODAL_PENALTY_FACTOR: f64 = 10_000.0;
pub const DEFAULT_PIPE_PENALTY_FACTOR: f64 = 1_000_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub max_generations: usize,
    pub seed: u64,
    /// Currency per metre of head deficit.
    pub nodal_penalty_factor: f64,
    /// Currency per m/m of gradient excess.
    pub pipe_penalty_factor: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            crossover_probability: 0.8,
            mutation_probability: 0.05,
            max_generations: 5000,
            seed: 0,
            nodal_penalty_factor: DEFAULT_NODAL_PENALTY_FACTOR,
            pipe_penalty_factor: DEFAULT_PIPE_PENALTY_FACTOR,
        }
    }
}

impl GaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return fail(format!(
                "population size must be even and at least 2, got {}",
                self.population_size
            ));
        }
        for (name, p) in [
            ("crossover probability", self.crossover_probability),
            ("mutation probability", self.mutation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.max_generations < 1 {
            return fail("max generations must be at least 1".into());
        }
        for (name, f) in [
            ("nodal penalty factor", self.nodal_penalty_factor),
            ("pipe penalty factor", self.pipe_penalty_factor),
        ] {
            if !(f >= 0.0 && f.is_finite()) {
                return fail(format!("{name} must be finite and non-negative, got {f}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedIndividual {
    pub design: DesignVector,
    pub cost: f64,
    pub nodal_penalty: f64,
    pub pipe_penalty: f64,
    pub fitness: f64,
    pub feasible: bool,
}

impl EvaluatedIndividual {
    pub fn total_penalty(&self) -> f64 {
        self.nodal_penalty + self.pipe_penalty
    }

    /// NP + PP + cost.
    pub fn penalized_cost(&self) -> f64 {
        self.nodal_penalty + self.pipe_penalty + self.cost
    }
}

/// Simulates `design` and scores it.
pub fn evaluate_fitness(
    problem: &Problem,
    design: &DesignVector,
    nodal_penalty_factor: f64,
    pipe_penalty_factor: f64,
) -> Result<EvaluatedIndividual> {
    let result = problem.simulate(design)?;
    let cost = problem.design_cost(design)?;
    let settings = problem.settings();
    let nodal_penalty = nodal_penalty_factor * result.head_deficit(settings);
    let pipe_penalty = pipe_penalty_factor * result.gradient_excess(settings);
    Ok(EvaluatedIndividual {
        design: design.clone(),
        cost,
        nodal_penalty,
        pipe_penalty,
        fitness: FITNESS_SCALE / (nodal_penalty + pipe_penalty + cost),
        feasible: result.feasible(),
    })
}

/// Global-best state after one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Penalized cost of the best individual seen so far.
    pub best_cost: f64,
    pub best_fitness: f64,
    /// Feasible individuals in this generation's population.
    pub n_feasible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Lowest penalized cost seen in the run, feasible or not.
    pub best: EvaluatedIndividual,
    /// Cheapest feasible individual seen in the run, if any.
    pub best_feasible: Option<EvaluatedIndividual>,
    pub history: Vec<GenerationRecord>,
    pub config: GaConfig,
    #[serde(skip)]
    pub elapsed: Duration,
}
