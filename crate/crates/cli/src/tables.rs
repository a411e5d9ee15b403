//! CSV renderings of run records. Every table is recomputable from the
//! records alone and uses Rust's shortest round-trip float formatting.

use std::fmt::Write;

use srva_core::metrics::percentile;
use srva_core::{summarize, RunRecord};

/// `iteration,n,hv,hv_std_error,igd_plus,wall_seconds`, one row per iteration.
pub fn metrics_csv(rec: &RunRecord) -> String {
    let mut out = String::from("iteration,n,hv,hv_std_error,igd_plus,wall_seconds\n");
    for (i, it) in rec.iterations.iter().enumerate() {
        let wall = rec.wall_seconds.get(i).copied().unwrap_or(f64::NAN);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            it.iteration,
            it.n,
            it.hv,
            it.hv_std_error,
            optional(it.igd_plus),
            wall
        )
        .unwrap();
    }
    out
}

/// Final non-dominated archive: sample index, design vector, objectives.
pub fn nds_csv(rec: &RunRecord) -> String {
    let mut out = String::from("index");
    for k in 0..rec.n_var {
        write!(out, ",x{k}").unwrap();
    }
    for k in 0..rec.n_obj {
        write!(out, ",f{k}").unwrap();
    }
    out.push('\n');
    for &i in &rec.final_iteration().nds {
        out.push_str(&i.to_string());
        for v in rec.x[i].iter().chain(&rec.f[i]) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Final HV and IGD+ statistics over a case's runs, ordered by seed.
pub fn summary_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("metric,count,mean,std,min,max\n");
    let hv: Vec<f64> = records.iter().map(RunRecord::final_hv).collect();
    push_summary(&mut out, "hv", &hv);
    let igd: Vec<f64> = records
        .iter()
        .filter_map(RunRecord::final_igd_plus)
        .collect();
    if !igd.is_empty() {
        push_summary(&mut out, "igd_plus", &igd);
    }
    out
}

fn push_summary(out: &mut String, name: &str, values: &[f64]) {
    let s = summarize(values);
    writeln!(
        out,
        "{name},{},{},{},{},{}",
        s.count, s.mean, s.std, s.min, s.max
    )
    .unwrap();
}

/// Mean and 25/75 percentiles of HV per iteration across a case's runs.
///
/// Rows stop at the shortest record so every row averages the same runs.
pub fn convergence_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("iteration,n,runs,hv_mean,hv_p25,hv_p75\n");
    let rows = records
        .iter()
        .map(|r| r.iterations.len())
        .min()
        .unwrap_or(0);
    for i in 0..rows {
        let hv: Vec<f64> = records.iter().map(|r| r.iterations[i].hv).collect();
        let mean = hv.iter().sum::<f64>() / hv.len() as f64;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            records[0].iterations[i].n,
            hv.len(),
            mean,
            percentile(&hv, 25.0),
            percentile(&hv, 75.0)
        )
        .unwrap();
    }
    out
}

/// Points as CSV with `f0..f{m-1}` headers.
pub fn points_csv(points: &[Vec<f64>]) -> String {
    let m = points.first().map_or(0, Vec::len);
    let header: Vec<String> = (0..m).map(|k| format!("f{k}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = p.iter().map(f64::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
