//! Summaries of a finished output directory.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use srva_core::{summarize, RunRecord};

use crate::plan::PlanMode;
use crate::tables;

#[derive(Debug)]
pub struct Report {
    pub text: String,
    /// Record files that could not be read, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

struct Group {
    problem: String,
    n_obj: usize,
    n_var: usize,
    mode: PlanMode,
    records: Vec<RunRecord>,
}

fn find_records(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            find_records(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "record.json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Case name for a record at `<case>/seed-<s>/record.json`.
fn case_name(root: &Path, path: &Path) -> String {
    let run = path.parent().unwrap_or(root);
    let case = run.parent().unwrap_or(root);
    case.strip_prefix(root)
        .ok()
        .filter(|p| !p.as_os_str().is_empty())
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| ".".into())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.len() == 1 {
        return (values[0], 0.0);
    }
    let s = summarize(values);
    (s.mean, s.std)
}

pub fn report(dir: &Path) -> Result<Report> {
    let mut paths = Vec::new();
    find_records(dir, &mut paths)?;
    let mut skipped = Vec::new();
    let mut groups: BTreeMap<String, Group> = BTreeMap::new();
    for path in paths {
        let parsed = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<RunRecord>(&s).map_err(|e| e.to_string()));
        let rec = match parsed {
            Ok(rec) if !rec.iterations.is_empty() => rec,
            Ok(_) => {
                skipped.push((path, "record holds no iterations".into()));
                continue;
            }
            Err(e) => {
                skipped.push((path, e));
                continue;
            }
        };
        let group = groups
            .entry(case_name(dir, &path))
            .or_insert_with(|| Group {
                problem: rec.problem.clone(),
                n_obj: rec.n_obj,
                n_var: rec.n_var,
                mode: PlanMode::from_vector_mode(rec.config.mode),
                records: Vec::new(),
            });
        group.records.push(rec);
    }
    if groups.is_empty() {
        bail!(
            "no readable run records under {} ({} skipped)",
            dir.display(),
            skipped.len()
        );
    }
    for g in groups.values_mut() {
        g.records.sort_by_key(|r| r.config.seed);
    }

    let mut text = String::new();
    writeln!(
        text,
        "case,problem,n_obj,mode,runs,samples,hv_mean,hv_std,igd_plus_mean,igd_plus_std"
    )?;
    for (name, g) in &groups {
        let hv: Vec<f64> = g.records.iter().map(RunRecord::final_hv).collect();
        let igd: Vec<f64> = g
            .records
            .iter()
            .filter_map(RunRecord::final_igd_plus)
            .collect();
        let (hv_mean, hv_std) = mean_std(&hv);
        let (igd_mean, igd_std) = if igd.is_empty() {
            (String::new(), String::new())
        } else {
            let (m, s) = mean_std(&igd);
            (m.to_string(), s.to_string())
        };
        writeln!(
            text,
            "{name},{},{},{},{},{},{hv_mean},{hv_std},{igd_mean},{igd_std}",
            g.problem,
            g.n_obj,
            g.mode,
            g.records.len(),
            g.records[0].final_iteration().n
        )?;
    }

    let mut by_problem: BTreeMap<(String, usize, usize), Vec<&Group>> = BTreeMap::new();
    for g in groups.values() {
        by_problem
            .entry((g.problem.clone(), g.n_obj, g.n_var))
            .or_default()
            .push(g);
    }
    let mut deltas = Vec::new();
    for ((problem, n_obj, _), gs) in &by_problem {
        let of =
            |mode: PlanMode| -> Vec<&&Group> { gs.iter().filter(|g| g.mode == mode).collect() };
        if let ([srva], [sld]) = (
            of(PlanMode::Srva).as_slice(),
            of(PlanMode::SldBaseline).as_slice(),
        ) {
            let hv = |g: &Group| {
                mean_std(
                    &g.records
                        .iter()
                        .map(RunRecord::final_hv)
                        .collect::<Vec<_>>(),
                )
                .0
            };
            deltas.push(format!(
                "{problem},{n_obj},{},{},{}",
                hv(srva),
                hv(sld),
                hv(srva) - hv(sld)
            ));
        }
    }
    if !deltas.is_empty() {
        writeln!(text)?;
        writeln!(
            text,
            "problem,n_obj,hv_srva,hv_sld_baseline,delta_srva_minus_sld"
        )?;
        for d in deltas {
            writeln!(text, "{d}")?;
        }
    }

    writeln!(text)?;
    writeln!(text, "case,iteration,n,runs,hv_mean,hv_p25,hv_p75")?;
    for (name, g) in &groups {
        for row in tables::convergence_csv(&g.records).lines().skip(1) {
            writeln!(text, "{name},{row}")?;
        }
    }
    Ok(Report { text, skipped })
}
