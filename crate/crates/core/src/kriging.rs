//! Ordinary Kriging with a Gaussian correlation model.
//!
//! Inputs are scaled to the unit hypercube by the training min/max and outputs
//! are standardized before fitting. The correlation weights `theta` maximize
//! the concentrated log-likelihood through a real-coded GA over `log10 theta`.
//! The correlation matrix gets a small nugget; when the Cholesky factorization
//! fails the nugget is raised tenfold up to [`NUGGET_MAX`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ea::{run_single_objective_ga, EaConfig};
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky};

/// Returned by [`log_likelihood`] when the likelihood is undefined
/// (constant outputs or a correlation matrix that cannot be factorized).
pub const LIKELIHOOD_UNDEFINED: f64 = -1.0e300;
pub const NUGGET_START: f64 = 1e-10;
pub const NUGGET_MAX: f64 = 1e-4;
const NUGGET_FACTOR: f64 = 10.0;

/// `exp(-sum_k theta_k (xi_k - xj_k)^2)`.
pub fn correlation(xi: &[f64], xj: &[f64], theta: &[f64]) -> f64 {
    let s: f64 = xi
        .iter()
        .zip(xj)
        .zip(theta)
        .map(|((a, b), t)| t * (a - b) * (a - b))
        .sum();
    (-s).exp()
}

/// GA settings for likelihood maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LikelihoodGaConfig {
    pub population: usize,
    pub generations: usize,
    pub log10_theta_lower: f64,
    pub log10_theta_upper: f64,
    pub eta_c: f64,
    pub p_c: f64,
    pub eta_m: f64,
    /// `None` means `1 / n_var`.
    pub p_m: Option<f64>,
    pub elitism: usize,
    pub seed: u64,
}

impl Default for LikelihoodGaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 50,
            log10_theta_lower: -3.0,
            log10_theta_upper: 3.0,
            eta_c: 15.0,
            p_c: 0.9,
            eta_m: 20.0,
            p_m: None,
            elitism: 1,
            seed: 0,
        }
    }
}

impl LikelihoodGaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::Config(
                "likelihood GA population must be >= 4".into(),
            ));
        }
        if self.generations < 1 {
            return Err(Error::Config(
                "likelihood GA needs at least one generation".into(),
            ));
        }
        if !(self.log10_theta_lower < self.log10_theta_upper) {
            return Err(Error::Config("likelihood GA theta range is empty".into()));
        }
        Ok(())
    }

    fn ea_config(&self) -> EaConfig {
        EaConfig {
            population: self.population,
            generations: self.generations,
            eta_c: self.eta_c,
            p_c: self.p_c,
            eta_m: self.eta_m,
            p_m: self.p_m,
            seed: self.seed,
            elitism: self.elitism,
            ..EaConfig::default()
        }
    }
}

/// Concentrated likelihood and the closed-form process parameters at one `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodEval {
    pub value: f64,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
    pub nugget: f64,
}

/// Training data with cached per-pair squared coordinate differences.
#[derive(Debug, Clone)]
struct TrainingSet {
    n: usize,
    m: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    /// For `i > j` in row-major order, `m` squared differences per pair.
    sq_diff: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Factorized {
    chol: Cholesky,
    nugget: f64,
    mu_hat: f64,
    sigma2_hat: f64,
    ln_likelihood: f64,
    /// `R^-1 (y - 1 mu)`.
    alpha: Vec<f64>,
    /// `L^-1 1`.
    l_inv_one: Vec<f64>,
    /// `1^T R^-1 1`.
    one_r_one: f64,
}

impl TrainingSet {
    fn new(rows: &[Vec<f64>], y: &[f64]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let x: Vec<f64> = rows.iter().flatten().copied().collect();
        let mut sq_diff = Vec::with_capacity(n * n.saturating_sub(1) / 2 * m);
        for i in 1..n {
            for j in 0..i {
                for k in 0..m {
                    let d = x[i * m + k] - x[j * m + k];
                    sq_diff.push(d * d);
                }
            }
        }
        Self {
            n,
            m,
            x,
            y: y.to_vec(),
            sq_diff,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.m..(i + 1) * self.m]
    }

    /// Lower triangle of `R` without the nugget; the diagonal holds 1.
    fn correlation_matrix(&self, theta: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut r = vec![0.0; n * n];
        let mut p = 0;
        for i in 0..n {
            for j in 0..i {
                let s = dot(&self.sq_diff[p..p + m], theta);
                r[i * n + j] = (-s).exp();
                p += m;
            }
            r[i * n + i] = 1.0;
        }
        r
    }

    fn y_is_constant(&self) -> bool {
        self.y.iter().all(|&v| v == self.y[0])
    }

    fn factorize(&self, theta: &[f64]) -> Option<Factorized> {
        let n = self.n;
        let base = self.correlation_matrix(theta);
        let mut nugget = NUGGET_START;
        let chol = loop {
            let mut r = base.clone();
            for i in 0..n {
                r[i * n + i] += nugget;
            }
            if let Some(c) = Cholesky::factor(r, n) {
                break c;
            }
            nugget *= NUGGET_FACTOR;
            if nugget > NUGGET_MAX * (1.0 + 1e-9) {
                return None;
            }
        };

        let mut l_inv_one = vec![1.0; n];
        chol.forward(&mut l_inv_one);
        let mut l_inv_y = self.y.clone();
        chol.forward(&mut l_inv_y);
        let one_r_one = dot(&l_inv_one, &l_inv_one);
        let one_r_y = dot(&l_inv_one, &l_inv_y);
        let mu_hat = one_r_y / one_r_one;
        let mut alpha: Vec<f64> = l_inv_y
            .iter()
            .zip(&l_inv_one)
            .map(|(a, b)| a - mu_hat * b)
            .collect();
        let sigma2_hat = dot(&alpha, &alpha) / n as f64;
        chol.backward(&mut alpha);
        let ln_likelihood = if sigma2_hat > 0.0 && sigma2_hat.is_finite() {
            -0.5 * (n as f64 * sigma2_hat.ln() + chol.log_det())
        } else {
            LIKELIHOOD_UNDEFINED
        };
        Some(Factorized {
            chol,
            nugget,
            mu_hat,
            sigma2_hat,
            ln_likelihood,
            alpha,
            l_inv_one,
            one_r_one,
        })
    }

    fn likelihood(&self, theta: &[f64]) -> f64 {
        if self.y_is_constant() {
            return LIKELIHOOD_UNDEFINED;
        }
        self.factorize(theta)
            .map_or(LIKELIHOOD_UNDEFINED, |f| f.ln_likelihood)
    }
}

/// Concentrated log-likelihood `-(n ln sigma2 + ln|R|) / 2` for the data as given
/// (no input scaling or output standardization).
pub fn log_likelihood(x: &[Vec<f64>], y: &[f64], theta: &[f64]) -> LikelihoodEval {
    let set = TrainingSet::new(x, y);
    let undefined = LikelihoodEval {
        value: LIKELIHOOD_UNDEFINED,
        mu_hat: y.first().copied().unwrap_or(0.0),
        sigma2_hat: 0.0,
        nugget: NUGGET_START,
    };
    if set.y_is_constant() {
        return undefined;
    }
    match set.factorize(theta) {
        Some(f) => LikelihoodEval {
            value: f.ln_likelihood,
            mu_hat: f.mu_hat,
            sigma2_hat: f.sigma2_hat,
            nugget: f.nugget,
        },
        None => undefined,
    }
}

#[derive(Debug, Clone)]
enum Fit {
    Constant,
    Process(Box<Factorized>),
}

/// Fitted parameters, for run-record dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrigingSummary {
    pub n_train: usize,
    pub theta: Vec<f64>,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
    pub nugget: f64,
    pub ln_likelihood: f64,
}

/// An ordinary Kriging model of one objective.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    x_min: Vec<f64>,
    x_span: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    theta: Vec<f64>,
    train: TrainingSet,
    fit: Fit,
}

/// Removes repeated rows, keeping the position of the first and the value of the last.
fn dedup_rows(x: &[Vec<f64>], y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (row, &v) in x.iter().zip(y) {
        let key: Vec<u64> = row.iter().map(|c| (c + 0.0).to_bits()).collect();
        match seen.get(&key) {
            Some(&i) => values[i] = v,
            None => {
                seen.insert(key, rows.len());
                rows.push(row.clone());
                values.push(v);
            }
        }
    }
    (rows, values)
}

impl KrigingModel {
    /// Fits `theta` by maximizing the likelihood with a GA.
    pub fn fit(x: &[Vec<f64>], y: &[f64], cfg: &LikelihoodGaConfig) -> Result<Self> {
        cfg.validate()?;
        let m = x.first().map_or(0, Vec::len);
        let ga = cfg.ea_config();
        Self::build(x, y, |train| {
            let lower = vec![cfg.log10_theta_lower; m];
            let upper = vec![cfg.log10_theta_upper; m];
            let best = run_single_objective_ga(
                |genes| {
                    let theta: Vec<f64> = genes.iter().map(|g| 10f64.powf(*g)).collect();
                    -train.likelihood(&theta)
                },
                &lower,
                &upper,
                &ga,
            );
            best.genes.iter().map(|g| 10f64.powf(*g)).collect()
        })
    }

    /// Builds the model at a fixed `theta` (in scaled input units).
    pub fn with_theta(x: &[Vec<f64>], y: &[f64], theta: &[f64]) -> Result<Self> {
        Self::build(x, y, |_| theta.to_vec())
    }

    fn build(
        x: &[Vec<f64>],
        y: &[f64],
        choose_theta: impl FnOnce(&TrainingSet) -> Vec<f64>,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} design rows but {} observations",
                x.len(),
                y.len()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("observations must be finite".into()));
        }
        let (rows, values) = dedup_rows(x, y);
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "kriging needs at least two distinct design points, got {}",
                rows.len()
            )));
        }
        let m = rows[0].len();
        let mut x_min = vec![f64::INFINITY; m];
        let mut x_max = vec![f64::NEG_INFINITY; m];
        for r in &rows {
            for k in 0..m {
                x_min[k] = x_min[k].min(r[k]);
                x_max[k] = x_max[k].max(r[k]);
            }
        }
        let x_span: Vec<f64> = x_min
            .iter()
            .zip(&x_max)
            .map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 })
            .collect();
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| (0..m).map(|k| (r[k] - x_min[k]) / x_span[k]).collect())
            .collect();

        let n = values.len() as f64;
        let y_mean = values.iter().sum::<f64>() / n;
        let y_var = values.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n;
        let constant = values.iter().all(|&v| v == values[0]) || y_var <= 0.0;
        let y_std = if constant { 1.0 } else { y_var.sqrt() };
        let y_mean = if constant { values[0] } else { y_mean };
        let standardized: Vec<f64> = values.iter().map(|v| (v - y_mean) / y_std).collect();
        let train = TrainingSet::new(&scaled, &standardized);

        if constant {
            return Ok(Self {
                x_min,
                x_span,
                y_mean,
                y_std,
                theta: vec![0.0; m],
                train,
                fit: Fit::Constant,
            });
        }
        let theta = choose_theta(&train);
        let f = train.factorize(&theta).ok_or_else(|| {
            Error::Fit(format!(
                "correlation matrix not positive definite at nugget {NUGGET_MAX}"
            ))
        })?;
        Ok(Self {
            x_min,
            x_span,
            y_mean,
            y_std,
            theta,
            train,
            fit: Fit::Process(Box::new(f)),
        })
    }

    pub fn n_train(&self) -> usize {
        self.train.n
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `(min, span)` per input dimension used to scale inputs to the unit cube.
    pub fn input_scaling(&self) -> (&[f64], &[f64]) {
        (&self.x_min, &self.x_span)
    }

    /// `(mean, std)` used to standardize the outputs.
    pub fn output_scaling(&self) -> (f64, f64) {
        (self.y_mean, self.y_std)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.fit, Fit::Constant)
    }

    pub fn nugget(&self) -> f64 {
        match &self.fit {
            Fit::Constant => 0.0,
            Fit::Process(f) => f.nugget,
        }
    }

    /// `mu_hat` and `sigma2_hat` in standardized output units.
    pub fn process_parameters(&self) -> (f64, f64) {
        match &self.fit {
            Fit::Constant => (0.0, 0.0),
            Fit::Process(f) => (f.mu_hat, f.sigma2_hat),
        }
    }

    pub fn ln_likelihood(&self) -> f64 {
        match &self.fit {
            Fit::Constant => LIKELIHOOD_UNDEFINED,
            Fit::Process(f) => f.ln_likelihood,
        }
    }

    pub fn summary(&self) -> KrigingSummary {
        let (mu_hat, sigma2_hat) = self.process_parameters();
        KrigingSummary {
            n_train: self.n_train(),
            theta: self.theta.clone(),
            mu_hat,
            sigma2_hat,
            nugget: self.nugget(),
            ln_likelihood: self.ln_likelihood(),
        }
    }

    fn correlations(&self, x: &[f64]) -> Vec<f64> {
        let m = self.train.m;
        let mut xs = [0.0f64; 64];
        let mut heap;
        let scaled: &mut [f64] = if m <= 64 {
            &mut xs[..m]
        } else {
            heap = vec![0.0; m];
            &mut heap
        };
        for k in 0..m {
            scaled[k] = (x[k] - self.x_min[k]) / self.x_span[k];
        }
        (0..self.train.n)
            .map(|i| {
                let row = self.train.row(i);
                let mut s = 0.0;
                for k in 0..m {
                    let d = scaled[k] - row[k];
                    s += self.theta[k] * d * d;
                }
                (-s).exp()
            })
            .collect()
    }

    /// Predictive mean in original units.
    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        match &self.fit {
            Fit::Constant => self.y_mean,
            Fit::Process(f) => {
                let r = self.correlations(x);
                self.y_mean + self.y_std * (f.mu_hat + dot(&r, &f.alpha))
            }
        }
    }

    /// Predictive mean and variance in original units; the variance is clamped at zero.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        match &self.fit {
            Fit::Constant => (self.y_mean, 0.0),
            Fit::Process(f) => {
                let mut r = self.correlations(x);
                let mean = f.mu_hat + dot(&r, &f.alpha);
                f.chol.forward(&mut r);
                let r_r = dot(&r, &r);
                let one_r = dot(&f.l_inv_one, &r);
                let var = f.sigma2_hat * (1.0 - r_r + (1.0 - one_r).powi(2) / f.one_r_one);
                (
                    self.y_mean + self.y_std * mean,
                    (self.y_std * self.y_std * var).max(0.0),
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense-inverse evaluation of the Kriging equations, independent of the
    /// Cholesky path. Returns `(mu, sigma2, ln_likelihood, R^-1)`.
    fn oracle(
        x: &[Vec<f64>],
        y: &[f64],
        theta: &[f64],
        nugget: f64,
    ) -> (f64, f64, f64, DMatrix<f64>) {
        let n = x.len();
        let r = DMatrix::from_fn(n, n, |i, j| {
            let base = correlation(&x[i], &x[j], theta);
            if i == j {
                base + nugget
            } else {
                base
            }
        });
        let r_inv = r.clone().try_inverse().expect("invertible");
        let one = DVector::from_element(n, 1.0);
        let yv = DVector::from_column_slice(y);
        let mu = (one.transpose() * &r_inv * &yv)[0] / (one.transpose() * &r_inv * &one)[0];
        let resid = &yv - &one * mu;
        let sigma2 = (resid.transpose() * &r_inv * &resid)[0] / n as f64;
        let ln = -0.5 * (n as f64 * sigma2.ln() + r.determinant().ln());
        (mu, sigma2, ln, r_inv)
    }

    fn oracle_predict(
        x: &[Vec<f64>],
        y: &[f64],
        theta: &[f64],
        nugget: f64,
        at: &[f64],
    ) -> (f64, f64) {
        let n = x.len();
        let (mu, sigma2, _, r_inv) = oracle(x, y, theta, nugget);
        let one = DVector::from_element(n, 1.0);
        let yv = DVector::from_column_slice(y);
        let r = DVector::from_fn(n, |i, _| correlation(at, &x[i], theta));
        let mean = mu + (r.transpose() * &r_inv * (&yv - &one * mu))[0];
        let one_r_one = (one.transpose() * &r_inv * &one)[0];
        let one_r = (one.transpose() * &r_inv * &r)[0];
        let var =
            sigma2 * (1.0 - (r.transpose() * &r_inv * &r)[0] + (1.0 - one_r).powi(2) / one_r_one);
        (mean, var.max(0.0))
    }

    fn random_instance(
        rng: &mut ChaCha8Rng,
        n: usize,
        m: usize,
    ) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random()).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let theta: Vec<f64> = (0..m)
            .map(|_| 10f64.powf(rng.random_range(-0.5..1.5)))
            .collect();
        (x, y, theta)
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn correlation_cases() {
        assert_eq!(correlation(&[0.3, 0.4], &[0.3, 0.4], &[5.0, 2.0]), 1.0);
        assert_eq!(correlation(&[0.0, 9.0], &[1.0, -3.0], &[0.0, 0.0]), 1.0);
        assert!((correlation(&[0.0], &[1.0], &[1.0]) - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(
            correlation(&[0.1, 0.7], &[0.9, 0.2], &[1.0, 3.0]),
            correlation(&[0.9, 0.2], &[0.1, 0.7], &[1.0, 3.0])
        );
    }

    #[test]
    fn two_distant_points_closed_form() {
        let x = vec![vec![0.0], vec![10.0]];
        let ll = log_likelihood(&x, &[0.0, 2.0], &[10.0]);
        assert!((ll.mu_hat - 1.0).abs() < 1e-9);
        assert!((ll.sigma2_hat - 1.0).abs() < 1e-9);
        assert!(ll.value.abs() < 1e-9);
    }

    #[test]
    fn constant_outputs_are_undefined() {
        let x = vec![vec![0.0], vec![0.5], vec![1.0]];
        let ll = log_likelihood(&x, &[4.0, 4.0, 4.0], &[1.0]);
        assert_eq!(ll.value, LIKELIHOOD_UNDEFINED);
        assert_eq!(ll.sigma2_hat, 0.0);
    }

    #[test]
    fn likelihood_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let (x, y, theta) = random_instance(&mut rng, 6, 2);
            let ll = log_likelihood(&x, &y, &theta);
            let (mu, sigma2, ln, _) = oracle(&x, &y, &theta, ll.nugget);
            assert!(rel_close(ll.mu_hat, mu, 1e-8), "{} vs {mu}", ll.mu_hat);
            assert!(
                rel_close(ll.sigma2_hat, sigma2, 1e-8),
                "{} vs {sigma2}",
                ll.sigma2_hat
            );
            assert!(rel_close(ll.value, ln, 1e-8), "{} vs {ln}", ll.value);
        }
    }

    #[test]
    fn prediction_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let (x, y, theta) = random_instance(&mut rng, 6, 2);
            let model = KrigingModel::with_theta(&x, &y, &theta).unwrap();
            let (x_min, x_span) = model.input_scaling();
            let (y_mean, y_std) = model.output_scaling();
            let scale =
                |p: &[f64]| -> Vec<f64> { (0..2).map(|k| (p[k] - x_min[k]) / x_span[k]).collect() };
            let xs: Vec<Vec<f64>> = x.iter().map(|p| scale(p)).collect();
            let ys: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_std).collect();
            let at: Vec<f64> = (0..2).map(|_| rng.random()).collect();
            let (mean, var) = model.predict(&at);
            let (om, ov) = oracle_predict(&xs, &ys, &theta, model.nugget(), &scale(&at));
            assert!(rel_close(mean, y_mean + y_std * om, 1e-8), "{mean} vs {om}");
            assert!(rel_close(var, y_std * y_std * ov, 1e-8), "{var} vs {ov}");
            assert_eq!(model.predict_mean(&at), mean);
        }
    }

    fn test_ga() -> LikelihoodGaConfig {
        LikelihoodGaConfig {
            population: 20,
            generations: 20,
            seed: 5,
            ..LikelihoodGaConfig::default()
        }
    }

    #[test]
    fn constant_outputs_predict_constant() {
        let x = vec![vec![0.1, 0.2], vec![0.5, 0.9], vec![0.8, 0.3]];
        let model = KrigingModel::fit(&x, &[3.0; 3], &test_ga()).unwrap();
        assert!(model.is_constant());
        assert_eq!(model.predict(&[0.4, 0.4]), (3.0, 0.0));
        assert_eq!(model.predict(&[2.0, -1.0]), (3.0, 0.0));
    }

    #[test]
    fn interpolates_training_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..3).map(|_| rng.random()).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|p| p[0].sin() + p[1] * p[2] + 2.0 * p[2])
            .collect();
        let model = KrigingModel::with_theta(&x, &y, &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(model.nugget(), NUGGET_START);
        let range = y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - y.iter().copied().fold(f64::INFINITY, f64::min);
        let (_, s2) = model.process_parameters();
        let y_std = model.output_scaling().1;
        for (p, &v) in x.iter().zip(&y) {
            let (mean, var) = model.predict(p);
            assert!((mean - v).abs() <= 1e-6 * range, "{mean} vs {v}");
            assert!(var <= 1e-6 * s2 * y_std * y_std);
        }
        for _ in 0..1000 {
            let at: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..1.5)).collect();
            assert!(model.predict(&at).1 >= 0.0);
        }
    }

    #[test]
    fn sine_loo_beats_constant_mean() {
        let n = 8;
        let x: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|p| (2.0 * std::f64::consts::PI * p[0]).sin())
            .collect();
        let mut se_krig = 0.0;
        let mut se_mean = 0.0;
        for i in 0..n {
            let xs: Vec<Vec<f64>> = x
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let ys: Vec<f64> = y
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| *v)
                .collect();
            let model = KrigingModel::fit(&xs, &ys, &test_ga()).unwrap();
            se_krig += (model.predict_mean(&x[i]) - y[i]).powi(2);
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            se_mean += (mean - y[i]).powi(2);
        }
        assert!(se_krig < se_mean, "kriging LOO {se_krig} vs mean {se_mean}");
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (x, y, _) = random_instance(&mut rng, 10, 2);
        let a = KrigingModel::fit(&x, &y, &test_ga()).unwrap();
        let b = KrigingModel::fit(&x, &y, &test_ga()).unwrap();
        assert_eq!(a.theta(), b.theta());
    }

    #[test]
    fn affine_output_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let x: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..2).map(|_| rng.random()).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|p| (3.0 * p[0]).cos() + p[1]).collect();
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v + 5.0).collect();
        let a = KrigingModel::fit(&x, &y, &test_ga()).unwrap();
        let b = KrigingModel::fit(&x, &y2, &test_ga()).unwrap();
        assert_eq!(a.theta(), b.theta());
        for _ in 0..50 {
            let at: Vec<f64> = (0..2).map(|_| rng.random()).collect();
            let (ma, va) = a.predict(&at);
            let (mb, vb) = b.predict(&at);
            assert!((mb - (2.0 * ma + 5.0)).abs() < 1e-9);
            assert!((vb - 4.0 * va).abs() < 1e-9 * (1.0 + va));
        }
    }

    #[test]
    fn duplicates_keep_latest() {
        let x = vec![vec![0.0], vec![1.0], vec![0.0], vec![0.5]];
        let y = vec![1.0, 2.0, 5.0, 0.0];
        let model = KrigingModel::with_theta(&x, &y, &[2.0]).unwrap();
        assert_eq!(model.n_train(), 3);
        assert!((model.predict_mean(&[0.0]) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let x = vec![vec![0.2, 0.2], vec![0.2, 0.2]];
        assert!(matches!(
            KrigingModel::fit(&x, &[1.0, 2.0], &test_ga()),
            Err(Error::InvalidInput(_))
        ));
        let bad = LikelihoodGaConfig {
            population: 2,
            ..LikelihoodGaConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
