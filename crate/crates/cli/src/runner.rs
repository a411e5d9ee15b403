//! Executes a plan on a worker pool and writes its artifacts.
//!
//! Layout under the output directory:
//!
//! ```text
//! plan.json                         resolved plan
//! <case>/summary.csv                final HV / IGD+ statistics
//! <case>/convergence.csv            per-iteration HV mean and quartiles
//! <case>/seed-<s>/record.json       full RunRecord
//! <case>/seed-<s>/metrics.csv       per-iteration indicators and timings
//! <case>/seed-<s>/nds.csv           final non-dominated archive
//! <case>/seed-<s>/error.txt         only when the run failed
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use srva_core::RunRecord;

use crate::plan::{Case, ExperimentPlan};
use crate::tables;

pub const WORKERS_ENV: &str = "SRVA_WORKERS";

/// Worker-pool width from `SRVA_WORKERS`; `None` leaves the choice to rayon.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("{WORKERS_ENV} must be a positive integer, got `{v}`"),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("{WORKERS_ENV}: {e}")),
    }
}

pub fn case_dir(plan: &ExperimentPlan, case: &Case) -> PathBuf {
    plan.output_dir.join(case.id())
}

pub fn run_dir(plan: &ExperimentPlan, case: &Case, seed: u64) -> PathBuf {
    case_dir(plan, case).join(format!("seed-{seed}"))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run_one(plan: &ExperimentPlan, case: &Case, seed: u64) -> Result<RunRecord> {
    let dir = run_dir(plan, case, seed);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let problem = case.problem()?;
    log::info!("{} seed {seed}: started", case.id());
    let result = srva_core::run(&problem, &case.config_for(seed));
    let rec = match result {
        Ok(rec) => rec,
        Err(e) => {
            write(&dir.join("error.txt"), &format!("{e}\n"))?;
            bail!("{} seed {seed}: {e}", case.id());
        }
    };
    let _ = std::fs::remove_file(dir.join("error.txt"));
    write(&dir.join("record.json"), &serde_json::to_string(&rec)?)?;
    write(&dir.join("metrics.csv"), &tables::metrics_csv(&rec))?;
    write(&dir.join("nds.csv"), &tables::nds_csv(&rec))?;
    log::info!(
        "{} seed {seed}: final HV {} after {} samples",
        case.id(),
        rec.final_hv(),
        rec.final_iteration().n
    );
    Ok(rec)
}

fn write_case_tables(plan: &ExperimentPlan, case: &Case, records: &[RunRecord]) -> Result<()> {
    let dir = case_dir(plan, case);
    write(&dir.join("summary.csv"), &tables::summary_csv(records))?;
    write(
        &dir.join("convergence.csv"),
        &tables::convergence_csv(records),
    )
}

/// Runs every `(case, seed)` pair. Successful runs are written even when
/// others fail; the returned error lists the failures.
pub fn run_plan(plan: &ExperimentPlan, workers: Option<usize>) -> Result<()> {
    std::fs::create_dir_all(&plan.output_dir)
        .with_context(|| format!("creating {}", plan.output_dir.display()))?;
    write(
        &plan.output_dir.join("plan.json"),
        &serde_json::to_string_pretty(plan)?,
    )?;
    let jobs: Vec<(usize, u64)> = plan
        .cases
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building the worker pool")?;
    let results: Vec<Result<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, seed)| run_one(plan, &plan.cases[i], seed))
            .collect()
    });

    let mut failures = Vec::new();
    for (i, case) in plan.cases.iter().enumerate() {
        let mut records = Vec::new();
        for (&(ci, _), result) in jobs.iter().zip(&results) {
            if ci != i {
                continue;
            }
            match result {
                Ok(rec) => records.push(rec.clone()),
                Err(e) => failures.push(format!("{e:#}")),
            }
        }
        if !records.is_empty() {
            write_case_tables(plan, case, &records)?;
        }
    }
    if !failures.is_empty() {
        bail!(
            "{} of {} runs failed:\n  {}",
            failures.len(),
            jobs.len(),
            failures.join("\n  ")
        );
    }
    Ok(())
}
