//! Evolutionary engines used inside the optimizer: a single-objective GA,
//! NSGA-III for front estimation on the surrogates, and MOEA/D for infill
//! maximization.

mod ga;
mod moead;
mod nsga3;
mod operators;

use serde::{Deserialize, Serialize};

pub use ga::run_single_objective_ga;
pub use moead::{moead_neighborhood_size, run_moead, ScalarSubproblems, SubproblemBest};
pub use nsga3::{nsga3_population_size, run_nsga3, Nsga3Output};
pub use operators::{polynomial_mutation, random_point, sbx_crossover};

/// A design point with its scalar fitness (minimization for the GA).
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub fitness: f64,
}

/// Settings shared by the evolutionary engines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaConfig {
    pub population: usize,
    pub generations: usize,
    pub eta_c: f64,
    pub p_c: f64,
    pub eta_m: f64,
    /// Per-gene mutation probability; `None` means `1 / n_var`.
    pub p_m: Option<f64>,
    pub seed: u64,
    /// Number of best individuals copied unchanged into the next GA generation.
    pub elitism: usize,
    /// MOEA/D neighborhood size; `None` means `max(2, ceil(N / 10))`.
    pub neighborhood: Option<usize>,
    /// MOEA/D probability of mating inside the neighborhood.
    pub delta: f64,
    /// MOEA/D cap on incumbents replaced by one child.
    pub max_replace: usize,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 100,
            eta_c: 15.0,
            p_c: 1.0,
            eta_m: 20.0,
            p_m: None,
            seed: 0,
            elitism: 1,
            neighborhood: None,
            delta: 0.9,
            max_replace: 2,
        }
    }
}

impl EaConfig {
    pub fn mutation_probability(&self, n_var: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / n_var.max(1) as f64)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
