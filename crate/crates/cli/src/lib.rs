//! Experiment runner around `srva-core`: plan files, batch execution on a
//! worker pool, CSV tables and reports.

pub mod plan;
pub mod report;
pub mod runner;
pub mod tables;

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srva_core::Dtlz;

pub use plan::{parse_config, Case, ExperimentPlan, PlanMode};
pub use report::{report, Report};
pub use runner::{run_plan, workers_from_env};

/// Seeded sample of a benchmark's analytic Pareto front as CSV.
pub fn pf_cache(problem: &str, n_obj: usize, count: usize, seed: u64) -> Result<String> {
    let problem = Dtlz::from_name(problem, n_obj, plan::DEFAULT_N_VAR.max(n_obj))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = problem.sample_true_pf(count, &mut rng)?;
    Ok(tables::points_csv(&points))
}
