//! Experiment plans: a versioned JSON file listing cases and seeds.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use srva_core::{Dtlz, DtlzKind, OptimizerConfig, RefVectorMode};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_N_VAR: usize = 10;

/// Reference-vector mode as spelled in plan files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    Srva,
    SldBaseline,
}

impl PlanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::Srva => "srva",
            PlanMode::SldBaseline => "sld-baseline",
        }
    }

    pub fn vector_mode(self) -> RefVectorMode {
        match self {
            PlanMode::Srva => RefVectorMode::Adaptive,
            PlanMode::SldBaseline => RefVectorMode::Sld,
        }
    }

    pub fn from_vector_mode(mode: RefVectorMode) -> Self {
        match mode {
            RefVectorMode::Adaptive => PlanMode::Srva,
            RefVectorMode::Sld => PlanMode::SldBaseline,
        }
    }
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_n_var() -> usize {
    DEFAULT_N_VAR
}

fn default_mode() -> PlanMode {
    PlanMode::Srva
}

/// One problem/mode combination run over a list of seeds.
///
/// `config.mode` and `config.seed` are overwritten by `mode` and each entry of
/// `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    #[serde(default)]
    pub name: Option<String>,
    pub problem: DtlzKind,
    pub n_obj: usize,
    #[serde(default = "default_n_var")]
    pub n_var: usize,
    #[serde(default = "default_mode")]
    pub mode: PlanMode,
    #[serde(default)]
    pub config: OptimizerConfig,
    pub seeds: Vec<u64>,
}

impl Case {
    pub fn id(&self) -> String {
        match &self.name {
            Some(name) => name.clone(),
            None => format!("{}-m{}-{}", self.problem, self.n_obj, self.mode),
        }
    }

    pub fn problem(&self) -> Result<Dtlz> {
        Ok(Dtlz::new(self.problem, self.n_obj, self.n_var)?)
    }

    pub fn config_for(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            seed,
            mode: self.mode.vector_mode(),
            ..self.config.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub schema_version: u32,
    /// Relative paths resolve against the plan file's directory.
    pub output_dir: PathBuf,
    pub cases: Vec<Case>,
}

impl ExperimentPlan {
    /// Parses and validates a plan held in memory. `base` anchors a relative
    /// `output_dir`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut plan: ExperimentPlan =
            serde_json::from_str(text).context("plan does not match the schema")?;
        if plan.output_dir.is_relative() {
            plan.output_dir = base.join(&plan.output_dir);
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            );
        }
        if self.cases.is_empty() {
            bail!("cases: at least one case is required");
        }
        let mut ids = HashSet::new();
        for (i, case) in self.cases.iter().enumerate() {
            let id = case.id();
            let ctx = || format!("cases[{i}] ({id})");
            if case.seeds.is_empty() {
                bail!("{}: seeds: at least one seed is required", ctx());
            }
            let mut seen = HashSet::new();
            if let Some(dup) = case.seeds.iter().find(|s| !seen.insert(**s)) {
                bail!("{}: seeds: {dup} is listed twice", ctx());
            }
            if !ids.insert(id.clone()) {
                bail!("{}: another case has the same name; set `name`", ctx());
            }
            let problem = case.problem().with_context(ctx)?;
            if problem.default_hv_reference().is_none() {
                bail!(
                    "{}: no hypervolume reference point for {} with {} objectives",
                    ctx(),
                    case.problem,
                    case.n_obj
                );
            }
            case.config_for(case.seeds[0])
                .validate(case.n_obj, case.n_var)
                .with_context(ctx)?;
        }
        Ok(())
    }
}

/// Reads, parses and validates a plan file, then checks that its output
/// directory can be created.
pub fn parse_config(path: &Path) -> Result<ExperimentPlan> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let plan = ExperimentPlan::from_json(&text, base)
        .with_context(|| format!("invalid plan {}", path.display()))?;
    std::fs::create_dir_all(&plan.output_dir)
        .with_context(|| format!("output_dir {} is not writable", plan.output_dir.display()))?;
    Ok(plan)
}
