use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "srva",
    version,
    about = "Many-objective Bayesian optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every case and seed of a JSON experiment plan.
    Run { config: PathBuf },
    /// Summarize the run records under an output directory.
    Report { dir: PathBuf },
    /// Sample a benchmark's analytic Pareto front to CSV.
    PfCache {
        problem: String,
        n_obj: usize,
        count: usize,
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let plan = srva_cli::parse_config(&config)?;
            srva_cli::run_plan(&plan, srva_cli::workers_from_env()?)?;
            println!("results in {}", plan.output_dir.display());
        }
        Command::Report { dir } => {
            let report = srva_cli::report(&dir)?;
            print!("{}", report.text);
            for (path, reason) in &report.skipped {
                log::warn!("skipped {}: {reason}", path.display());
            }
            if !report.skipped.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::PfCache {
            problem,
            n_obj,
            count,
            seed,
            output,
        } => {
            let csv = srva_cli::pf_cache(&problem, n_obj, count, seed)?;
            match output {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
