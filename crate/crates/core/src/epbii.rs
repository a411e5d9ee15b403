//! Expected PBI improvement.
//!
//! All quantities here live in the nadir/utopia-normalized objective space.
//! A reference vector owns a territory `d1 - theta_ref * d2 >= 0`. Inside it,
//! the criterion is the mean improvement of the PBI value over the best
//! in-territory sample across a fixed block of normal draws. Outside it,
//! the territory value itself (negative) pulls the search inward.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doe::latin_hypercube;
use crate::ea::{run_moead, EaConfig, ScalarSubproblems};
use crate::kriging::KrigingModel;
use crate::pareto::NadirUtopia;

pub const THETA_PBI: f64 = 1.0;
pub const DEFAULT_MC_SAMPLES: usize = 100;
/// Used when every projected reference vector coincides.
pub const FALLBACK_THETA_REF: f64 = 10.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pbi {
    pub g: f64,
    pub d1: f64,
    pub d2: f64,
}

fn pbi_distances(f: &[f64], lambda: &[f64]) -> (f64, f64) {
    let proj: f64 = f.iter().zip(lambda).map(|(a, b)| a * b).sum();
    let d1 = proj.abs();
    let d2 = f
        .iter()
        .zip(lambda)
        .map(|(a, l)| (a - d1 * l).powi(2))
        .sum::<f64>()
        .sqrt();
    (d1, d2)
}

/// PBI scalarization of `f` against the unit vector `lambda`.
pub fn pbi(f: &[f64], lambda: &[f64], theta_pbi: f64) -> Pbi {
    let (d1, d2) = pbi_distances(f, lambda);
    Pbi {
        g: d1 + theta_pbi * d2,
        d1,
        d2,
    }
}

/// Territory value; nonnegative inside the territory of `lambda`.
pub fn territory(f: &[f64], lambda: &[f64], theta_ref: f64) -> f64 {
    let (d1, d2) = pbi_distances(f, lambda);
    d1 - theta_ref * d2
}

/// Territory width and the pairwise distances between reference vectors
/// projected onto the unit-sum hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerritoryContext {
    pub theta_ref: f64,
    pub d_min: f64,
    pub d_ij: Vec<Vec<f64>>,
}

pub fn compute_theta_ref(vectors: &[Vec<f64>]) -> TerritoryContext {
    let projected: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let s: f64 = v.iter().sum();
            v.iter().map(|c| c / s).collect()
        })
        .collect();
    let n = projected.len();
    let mut d_ij = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = projected[i]
                .iter()
                .zip(&projected[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            d_ij[i][j] = d;
            d_ij[j][i] = d;
        }
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for i in 0..n {
        let nearest = (0..n)
            .filter(|&j| j != i)
            .map(|j| d_ij[i][j])
            .fold(f64::INFINITY, f64::min);
        if nearest > 0.0 && nearest.is_finite() {
            total += nearest;
            counted += 1;
        }
    }
    if counted < n && n > 1 {
        log::warn!(
            "{} reference vectors share a projection with another",
            n - counted
        );
    }
    if counted == 0 {
        log::warn!("all reference vectors coincide; using a narrow territory");
        return TerritoryContext {
            theta_ref: FALLBACK_THETA_REF,
            d_min: 0.0,
            d_ij,
        };
    }
    let d_min = total / counted as f64;
    TerritoryContext {
        theta_ref: std::f64::consts::SQRT_2 / d_min,
        d_min,
        d_ij,
    }
}

/// Best PBI value per reference vector among the samples in its territory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePbi {
    pub g_ref: Vec<f64>,
    /// Sample indices inside each territory.
    pub members: Vec<Vec<usize>>,
    /// True where the territory was empty and the global minimum was used.
    pub fallback: Vec<bool>,
}

pub fn reference_pbi(
    samples_norm: &[Vec<f64>],
    vectors: &[Vec<f64>],
    ctx: &TerritoryContext,
    theta_pbi: f64,
) -> ReferencePbi {
    let mut out = ReferencePbi {
        g_ref: Vec::with_capacity(vectors.len()),
        members: Vec::with_capacity(vectors.len()),
        fallback: Vec::with_capacity(vectors.len()),
    };
    for lambda in vectors {
        let mut inside = Vec::new();
        let mut best_inside = f64::INFINITY;
        let mut best_all = f64::INFINITY;
        for (s, f) in samples_norm.iter().enumerate() {
            let p = pbi(f, lambda, theta_pbi);
            best_all = best_all.min(p.g);
            if p.d1 - ctx.theta_ref * p.d2 >= 0.0 {
                inside.push(s);
                best_inside = best_inside.min(p.g);
            }
        }
        out.fallback.push(inside.is_empty());
        out.g_ref.push(if inside.is_empty() {
            best_all
        } else {
            best_inside
        });
        out.members.push(inside);
    }
    out
}

/// Fixed standard-normal draws shared by every criterion evaluation in one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSampleBlock {
    pub z: Vec<Vec<f64>>,
}

impl McSampleBlock {
    pub fn new<R: Rng + ?Sized>(count: usize, n_obj: usize, rng: &mut R) -> Self {
        assert!(count >= 1, "at least one Monte Carlo sample");
        Self {
            z: (0..count)
                .map(|_| (0..n_obj).map(|_| rng.sample(StandardNormal)).collect())
                .collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.z.len()
    }
}

/// Predictive mean and standard deviation per objective.
pub trait Surrogate: Sync {
    fn n_obj(&self) -> usize;

    fn predict(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);

    fn predict_mean(&self, x: &[f64]) -> Vec<f64> {
        self.predict(x).0
    }
}

impl Surrogate for [KrigingModel] {
    fn n_obj(&self) -> usize {
        self.len()
    }

    fn predict(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.iter()
            .map(|m| {
                let (mean, var) = m.predict(x);
                (mean, var.sqrt())
            })
            .unzip()
    }

    fn predict_mean(&self, x: &[f64]) -> Vec<f64> {
        self.iter().map(|m| m.predict_mean(x)).collect()
    }
}

/// Prediction mapped into the normalized space.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPrediction {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn normalized_prediction<S: Surrogate + ?Sized>(
    surrogate: &S,
    x: &[f64],
    nu: &NadirUtopia,
) -> NormalizedPrediction {
    let (mean, std) = surrogate.predict(x);
    NormalizedPrediction {
        mean: nu.normalize(&mean),
        std: std
            .iter()
            .zip(nu.nadir.iter().zip(&nu.utopia))
            .map(|(s, (n, u))| s / (n - u))
            .collect(),
    }
}

/// Criterion shared by every evaluation in one iteration.
#[derive(Debug, Clone, Copy)]
pub struct EpbiiSettings<'a> {
    pub theta_ref: f64,
    pub theta_pbi: f64,
    pub mc: &'a McSampleBlock,
}

/// Criterion value for a prediction already in normalized space.
pub fn epbii_from_prediction(
    pred: &NormalizedPrediction,
    lambda: &[f64],
    g_ref: f64,
    settings: &EpbiiSettings,
) -> f64 {
    let t = territory(&pred.mean, lambda, settings.theta_ref);
    if t < 0.0 {
        return t;
    }
    let mut f = vec![0.0; pred.mean.len()];
    let mut total = 0.0;
    for z in &settings.mc.z {
        for k in 0..f.len() {
            f[k] = pred.mean[k] + pred.std[k] * z[k];
        }
        total += (g_ref - pbi(&f, lambda, settings.theta_pbi).g).max(0.0);
    }
    total / settings.mc.count() as f64
}

pub fn epbii_value<S: Surrogate + ?Sized>(
    x: &[f64],
    lambda: &[f64],
    g_ref: f64,
    surrogate: &S,
    nu: &NadirUtopia,
    settings: &EpbiiSettings,
) -> f64 {
    epbii_from_prediction(
        &normalized_prediction(surrogate, x, nu),
        lambda,
        g_ref,
        settings,
    )
}

struct EpbiiSubproblems<'a, S: ?Sized> {
    vectors: &'a [Vec<f64>],
    g_ref: &'a [f64],
    surrogate: &'a S,
    nu: &'a NadirUtopia,
    settings: EpbiiSettings<'a>,
}

impl<S: Surrogate + ?Sized> ScalarSubproblems for EpbiiSubproblems<'_, S> {
    type Prepared = NormalizedPrediction;

    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn prepare(&self, x: &[f64]) -> NormalizedPrediction {
        normalized_prediction(self.surrogate, x, self.nu)
    }

    fn score(&self, pred: &NormalizedPrediction, i: usize) -> f64 {
        epbii_from_prediction(pred, &self.vectors[i], self.g_ref[i], &self.settings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub epbii: f64,
}

/// Inputs to the per-vector criterion maximization.
pub struct EpbiiProblem<'a, S: ?Sized> {
    pub vectors: &'a [Vec<f64>],
    pub g_ref: &'a [f64],
    pub surrogate: &'a S,
    pub nu: &'a NadirUtopia,
    pub settings: EpbiiSettings<'a>,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

/// Starting point per reference vector: the front member with the smallest
/// perpendicular distance to it, or LHS points when the front is empty.
pub fn initial_candidates<R: Rng + ?Sized>(
    vectors: &[Vec<f64>],
    front_x: &[Vec<f64>],
    front_f_norm: &[Vec<f64>],
    lower: &[f64],
    upper: &[f64],
    rng: &mut R,
) -> Vec<Vec<f64>> {
    if front_x.is_empty() {
        log::warn!("estimated front is empty; seeding the criterion search with LHS points");
        return latin_hypercube(vectors.len(), lower.len(), rng)
            .expect("non-empty design")
            .scaled(lower, upper);
    }
    vectors
        .iter()
        .map(|lambda| {
            let best = front_f_norm
                .iter()
                .enumerate()
                .map(|(j, f)| (j, pbi_distances(f, lambda).1))
                .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
            front_x[best.0].clone()
        })
        .collect()
}

/// Runs MOEA/D on the criterion of every reference vector at once.
pub fn maximize_epbii<S: Surrogate + ?Sized>(
    problem: &EpbiiProblem<S>,
    init: Vec<Vec<f64>>,
    cfg: &EaConfig,
) -> Vec<Candidate> {
    let subproblems = EpbiiSubproblems {
        vectors: problem.vectors,
        g_ref: problem.g_ref,
        surrogate: problem.surrogate,
        nu: problem.nu,
        settings: problem.settings,
    };
    run_moead(
        &subproblems,
        problem.vectors,
        init,
        problem.lower,
        problem.upper,
        cfg,
    )
    .into_iter()
    .map(|b| Candidate {
        x: b.x,
        epbii: b.value,
    })
    .collect()
}

/// Criterion values for many points against one vector each, in parallel.
pub fn epbii_batch<S: Surrogate + ?Sized>(problem: &EpbiiProblem<S>, xs: &[Vec<f64>]) -> Vec<f64> {
    xs.par_iter()
        .enumerate()
        .map(|(i, x)| {
            epbii_value(
                x,
                &problem.vectors[i],
                problem.g_ref[i],
                problem.surrogate,
                problem.nu,
                &problem.settings,
            )
        })
        .collect()
}
