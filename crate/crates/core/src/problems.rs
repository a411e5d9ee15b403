//! Optimization problems and the DTLZ benchmark family.
//!
//! All DTLZ problems use the box `[0, 1]^m` with `k = m - M + 1` distance
//! variables. Each problem can also sample its analytic Pareto front, which
//! is what the IGD+ reference clouds are built from.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A box-constrained multi-objective minimization problem.
pub trait Problem: Sync {
    fn name(&self) -> String;
    fn n_obj(&self) -> usize;
    fn n_var(&self) -> usize;
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn check_bounds(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_var() {
            return Err(Error::InvalidInput(format!(
                "expected {} design variables, got {}",
                self.n_var(),
                x.len()
            )));
        }
        for (index, ((&v, &lo), &hi)) in x.iter().zip(self.lower()).zip(self.upper()).enumerate() {
            if !(v >= lo && v <= hi) {
                return Err(Error::OutOfBounds {
                    index,
                    value: v,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DtlzKind {
    Dtlz1,
    Dtlz2,
    Dtlz3,
    Dtlz4,
    Dtlz5,
    Dtlz6,
    Dtlz7,
}

impl DtlzKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DtlzKind::Dtlz1 => "dtlz1",
            DtlzKind::Dtlz2 => "dtlz2",
            DtlzKind::Dtlz3 => "dtlz3",
            DtlzKind::Dtlz4 => "dtlz4",
            DtlzKind::Dtlz5 => "dtlz5",
            DtlzKind::Dtlz6 => "dtlz6",
            DtlzKind::Dtlz7 => "dtlz7",
        }
    }
}

impl fmt::Display for DtlzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DtlzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtlz1" => Ok(DtlzKind::Dtlz1),
            "dtlz2" => Ok(DtlzKind::Dtlz2),
            "dtlz3" => Ok(DtlzKind::Dtlz3),
            "dtlz4" => Ok(DtlzKind::Dtlz4),
            "dtlz5" => Ok(DtlzKind::Dtlz5),
            "dtlz6" => Ok(DtlzKind::Dtlz6),
            "dtlz7" => Ok(DtlzKind::Dtlz7),
            other => Err(Error::Unsupported(format!("unknown problem `{other}`"))),
        }
    }
}

/// A DTLZ instance with `n_obj` objectives and `n_var` design variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Dtlz {
    kind: DtlzKind,
    n_obj: usize,
    n_var: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Dtlz {
    pub fn new(kind: DtlzKind, n_obj: usize, n_var: usize) -> Result<Self> {
        if n_obj < 2 {
            return Err(Error::InvalidInput(format!(
                "at least two objectives required, got {n_obj}"
            )));
        }
        if n_var < n_obj {
            return Err(Error::InvalidInput(format!(
                "{kind} needs n_var >= n_obj (got n_var = {n_var}, n_obj = {n_obj})"
            )));
        }
        Ok(Self {
            kind,
            n_obj,
            n_var,
            lower: vec![0.0; n_var],
            upper: vec![1.0; n_var],
        })
    }

    pub fn from_name(name: &str, n_obj: usize, n_var: usize) -> Result<Self> {
        Self::new(name.parse()?, n_obj, n_var)
    }

    pub fn kind(&self) -> DtlzKind {
        self.kind
    }

    /// Number of distance variables `k`.
    pub fn k(&self) -> usize {
        self.n_var - self.n_obj + 1
    }

    /// Componentwise lower bound of the objective space (all DTLZ objectives are `>= 0`).
    pub fn ideal_point(&self) -> Vec<f64> {
        vec![0.0; self.n_obj]
    }

    /// Hypervolume reference point used for the 3- and 6-objective benchmarks.
    pub fn default_hv_reference(&self) -> Option<Vec<f64>> {
        let m = self.n_obj;
        match self.kind {
            DtlzKind::Dtlz1 => match m {
                3 => Some(vec![150.0; 3]),
                6 => Some(vec![50.0; 6]),
                _ => None,
            },
            DtlzKind::Dtlz7 => {
                let mut r = vec![1.1; m];
                r[m - 1] = 2.0 * m as f64 + 0.1;
                Some(r)
            }
            _ => Some(vec![1.1; m]),
        }
    }

    /// Size of the IGD+ reference cloud used for the 3- and 6-objective benchmarks.
    pub fn default_igd_reference_count(&self) -> Option<usize> {
        let (three, six) = match self.kind {
            DtlzKind::Dtlz1 | DtlzKind::Dtlz2 | DtlzKind::Dtlz3 | DtlzKind::Dtlz4 => (1326, 8568),
            DtlzKind::Dtlz5 | DtlzKind::Dtlz6 => (2000, 8000),
            DtlzKind::Dtlz7 => (2401, 7776),
        };
        match self.n_obj {
            3 => Some(three),
            6 => Some(six),
            _ => None,
        }
    }

    fn g(&self, xm: &[f64]) -> f64 {
        match self.kind {
            DtlzKind::Dtlz1 | DtlzKind::Dtlz3 => {
                let s: f64 = xm
                    .iter()
                    .map(|&x| (x - 0.5).powi(2) - (20.0 * PI * (x - 0.5)).cos())
                    .sum();
                100.0 * (xm.len() as f64 + s)
            }
            DtlzKind::Dtlz2 | DtlzKind::Dtlz4 | DtlzKind::Dtlz5 => {
                xm.iter().map(|&x| (x - 0.5).powi(2)).sum()
            }
            DtlzKind::Dtlz6 => xm.iter().map(|&x| x.powf(0.1)).sum(),
            DtlzKind::Dtlz7 => 1.0 + 9.0 / xm.len() as f64 * xm.iter().sum::<f64>(),
        }
    }

    fn evaluate_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let m = self.n_obj;
        let (pos, xm) = x.split_at(m - 1);
        let g = self.g(xm);
        match self.kind {
            DtlzKind::Dtlz1 => (0..m)
                .map(|i| {
                    let mut f = 0.5 * (1.0 + g);
                    for &p in &pos[..m - 1 - i] {
                        f *= p;
                    }
                    if i > 0 {
                        f *= 1.0 - pos[m - 1 - i];
                    }
                    f
                })
                .collect(),
            DtlzKind::Dtlz2 | DtlzKind::Dtlz3 => {
                let angles: Vec<f64> = pos.iter().map(|&p| p * FRAC_PI_2).collect();
                spherical(&angles, 1.0 + g)
            }
            DtlzKind::Dtlz4 => {
                let angles: Vec<f64> = pos.iter().map(|&p| p.powi(100) * FRAC_PI_2).collect();
                spherical(&angles, 1.0 + g)
            }
            DtlzKind::Dtlz5 | DtlzKind::Dtlz6 => {
                let angles: Vec<f64> = pos
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| {
                        if j == 0 {
                            p * FRAC_PI_2
                        } else {
                            PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * p)
                        }
                    })
                    .collect();
                spherical(&angles, 1.0 + g)
            }
            DtlzKind::Dtlz7 => {
                let mut f: Vec<f64> = pos.to_vec();
                let h = m as f64
                    - pos
                        .iter()
                        .map(|&fi| fi / (1.0 + g) * (1.0 + (3.0 * PI * fi).sin()))
                        .sum::<f64>();
                f.push((1.0 + g) * h);
                f
            }
        }
    }

    /// Draws `count` points on the analytic Pareto front.
    pub fn sample_true_pf<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidInput("count must be positive".into()));
        }
        let m = self.n_obj;
        let points = (0..count)
            .map(|_| match self.kind {
                DtlzKind::Dtlz1 => {
                    let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
                    let s: f64 = e.iter().sum();
                    e.into_iter().map(|v| 0.5 * v / s).collect()
                }
                DtlzKind::Dtlz2 | DtlzKind::Dtlz3 | DtlzKind::Dtlz4 => loop {
                    let z: Vec<f64> = (0..m)
                        .map(|_| {
                            let v: f64 = StandardNormal.sample(rng);
                            v.abs()
                        })
                        .collect();
                    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        break z.into_iter().map(|v| v / norm).collect();
                    }
                },
                DtlzKind::Dtlz5 | DtlzKind::Dtlz6 => {
                    let t: f64 = rng.random();
                    let mut angles = vec![FRAC_PI_4; m - 1];
                    angles[0] = t * FRAC_PI_2;
                    spherical(&angles, 1.0)
                }
                DtlzKind::Dtlz7 => {
                    let intervals = dtlz7_optimal_intervals();
                    let mut f: Vec<f64> = (0..m - 1)
                        .map(|_| loop {
                            let v: f64 = rng.random();
                            if intervals.iter().any(|&(a, b)| v >= a && v <= b) {
                                break v;
                            }
                        })
                        .collect();
                    let h = m as f64
                        - f.iter()
                            .map(|&fi| 0.5 * fi * (1.0 + (3.0 * PI * fi).sin()))
                            .sum::<f64>();
                    f.push(2.0 * h);
                    f
                }
            })
            .collect();
        Ok(points)
    }
}

impl Problem for Dtlz {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn n_obj(&self) -> usize {
        self.n_obj
    }

    fn n_var(&self) -> usize {
        self.n_var
    }

    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_bounds(x)?;
        Ok(self.evaluate_unchecked(x))
    }
}

/// `radius * [cos..cos, cos..sin, ..., sin]` for `M - 1` angles.
fn spherical(angles: &[f64], radius: f64) -> Vec<f64> {
    let m = angles.len() + 1;
    (0..m)
        .map(|i| {
            let mut f = radius;
            for &a in &angles[..m - 1 - i] {
                f *= a.cos();
            }
            if i > 0 {
                f *= angles[m - 1 - i].sin();
            }
            f
        })
        .collect()
}

fn dtlz7_tradeoff(t: f64) -> f64 {
    t * (1.0 + (3.0 * PI * t).sin())
}

fn dtlz7_tradeoff_slope(t: f64) -> f64 {
    1.0 + (3.0 * PI * t).sin() + 3.0 * PI * t * (3.0 * PI * t).cos()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Intervals of `x_i` (i < M) on which DTLZ7 solutions are Pareto optimal.
///
/// A coordinate value is optimal iff `t (1 + sin 3πt)` exceeds its value at
/// every smaller `t`, which gives two disjoint intervals on `[0, 1]`.
pub fn dtlz7_optimal_intervals() -> [(f64, f64); 2] {
    static INTERVALS: OnceLock<[(f64, f64); 2]> = OnceLock::new();
    *INTERVALS.get_or_init(|| {
        let first_peak = bisect(0.1, 1.0 / 3.0, dtlz7_tradeoff_slope);
        let second_peak = bisect(0.7, 0.95, dtlz7_tradeoff_slope);
        let peak_value = dtlz7_tradeoff(first_peak);
        let re_entry = bisect(0.5, second_peak, |t| dtlz7_tradeoff(t) - peak_value);
        [(0.0, first_peak), (re_entry, second_peak)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::dominates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x_half(n: usize) -> Vec<f64> {
        vec![0.5; n]
    }

    #[test]
    fn dtlz2_center_point() {
        let p = Dtlz::new(DtlzKind::Dtlz2, 3, 10).unwrap();
        let f = p.evaluate(&x_half(10)).unwrap();
        assert!((f[0] - 0.5).abs() < 1e-12);
        assert!((f[1] - 0.5).abs() < 1e-12);
        assert!((f[2] - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn dtlz1_center_point() {
        let p = Dtlz::new(DtlzKind::Dtlz1, 3, 10).unwrap();
        let f = p.evaluate(&x_half(10)).unwrap();
        assert!((f[0] - 0.125).abs() < 1e-12);
        assert!((f[1] - 0.125).abs() < 1e-12);
        assert!((f[2] - 0.25).abs() < 1e-12);
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dtlz7_origin() {
        let p = Dtlz::new(DtlzKind::Dtlz7, 3, 10).unwrap();
        let f = p.evaluate(&vec![0.0; 10]).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 6.0]);
    }

    #[test]
    fn out_of_bounds_is_rejected() {
        let p = Dtlz::new(DtlzKind::Dtlz2, 3, 10).unwrap();
        let mut x = x_half(10);
        x[4] = 1.5;
        assert!(matches!(
            p.evaluate(&x),
            Err(Error::OutOfBounds { index: 4, .. })
        ));
        assert!(p.evaluate(&x_half(9)).is_err());
    }

    #[test]
    fn invalid_dimensions() {
        assert!(Dtlz::new(DtlzKind::Dtlz2, 1, 10).is_err());
        assert!(Dtlz::new(DtlzKind::Dtlz2, 5, 4).is_err());
        assert!(Dtlz::from_name("zdt1", 2, 10).is_err());
        assert_eq!(
            Dtlz::from_name("DTLZ5", 3, 10).unwrap().kind(),
            DtlzKind::Dtlz5
        );
    }

    #[test]
    fn evaluation_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [
            DtlzKind::Dtlz1,
            DtlzKind::Dtlz2,
            DtlzKind::Dtlz5,
            DtlzKind::Dtlz7,
        ] {
            let p = Dtlz::new(kind, 3, 10).unwrap();
            let x: Vec<f64> = (0..10).map(|_| rng.random()).collect();
            let a = p.evaluate(&x).unwrap();
            let b = p.evaluate(&x).unwrap();
            assert_eq!(
                a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn distance_variables_at_half_land_on_front() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [DtlzKind::Dtlz2, DtlzKind::Dtlz5] {
            for m in [3, 6] {
                let p = Dtlz::new(kind, m, 10).unwrap();
                for _ in 0..50 {
                    let mut x = x_half(10);
                    for v in x.iter_mut().take(m - 1) {
                        *v = rng.random();
                    }
                    let f = p.evaluate(&x).unwrap();
                    let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!((norm - 1.0).abs() < 1e-12, "{kind} M={m}: {norm}");
                }
            }
        }
    }

    #[test]
    fn dtlz2_pf_on_unit_sphere() {
        let p = Dtlz::new(DtlzKind::Dtlz2, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in p.sample_true_pf(500, &mut rng).unwrap() {
            let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(f.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn dtlz1_pf_count_and_plane() {
        let p = Dtlz::new(DtlzKind::Dtlz1, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pf = p.sample_true_pf(1326, &mut rng).unwrap();
        assert_eq!(pf.len(), 1326);
        for f in &pf {
            assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dtlz5_pf_is_reachable_curve() {
        let p = Dtlz::new(DtlzKind::Dtlz5, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for f in p.sample_true_pf(200, &mut rng).unwrap() {
            // Degenerate curve: f1 == f2 for three objectives.
            assert!((f[0] - f[1]).abs() < 1e-12);
            let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    /// Grid brute force over `t` for the strict running maximum of the DTLZ7 trade-off.
    fn dtlz7_grid_intervals() -> Vec<(f64, f64)> {
        let n = 1_000_000;
        let mut best = f64::NEG_INFINITY;
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut open: Option<f64> = None;
        let step = 1.0 / n as f64;
        for i in 0..=n {
            let t = i as f64 * step;
            let v = t * (1.0 + (3.0 * PI * t).sin());
            if v > best {
                best = v;
                if open.is_none() {
                    open = Some(t);
                }
            } else if let Some(a) = open.take() {
                intervals.push((a, t - step));
            }
        }
        if let Some(a) = open {
            intervals.push((a, 1.0));
        }
        intervals
    }

    #[test]
    fn dtlz7_intervals_match_grid_oracle() {
        let grid = dtlz7_grid_intervals();
        let analytic = dtlz7_optimal_intervals();
        assert_eq!(grid.len(), 2, "{grid:?}");
        for (g, a) in grid.iter().zip(analytic.iter()) {
            assert!((g.0 - a.0).abs() < 2e-6, "{g:?} vs {a:?}");
            assert!((g.1 - a.1).abs() < 2e-6, "{g:?} vs {a:?}");
        }

        let p = Dtlz::new(DtlzKind::Dtlz7, 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in p.sample_true_pf(2401, &mut rng).unwrap() {
            for &v in &f[..2] {
                assert!(
                    grid.iter().any(|&(a, b)| v >= a - 2e-6 && v <= b + 2e-6),
                    "{v} outside {grid:?}"
                );
            }
            // g = 1 on the front.
            let h = 3.0
                - f[..2]
                    .iter()
                    .map(|&fi| 0.5 * fi * (1.0 + (3.0 * PI * fi).sin()))
                    .sum::<f64>();
            assert!((f[2] - 2.0 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn pf_samples_mutually_nondominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kind in [
            DtlzKind::Dtlz1,
            DtlzKind::Dtlz2,
            DtlzKind::Dtlz5,
            DtlzKind::Dtlz7,
        ] {
            let p = Dtlz::new(kind, 3, 10).unwrap();
            let pf = p.sample_true_pf(300, &mut rng).unwrap();
            for (i, a) in pf.iter().enumerate() {
                for (j, b) in pf.iter().enumerate() {
                    if i != j {
                        assert!(!dominates(a, b), "{kind}: {a:?} dominates {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn default_indicator_setup() {
        let p = Dtlz::new(DtlzKind::Dtlz7, 6, 10).unwrap();
        assert_eq!(p.default_hv_reference().unwrap()[5], 12.1);
        assert_eq!(p.default_igd_reference_count(), Some(7776));
        let p = Dtlz::new(DtlzKind::Dtlz5, 3, 10).unwrap();
        assert_eq!(p.default_igd_reference_count(), Some(2000));
        assert_eq!(p.default_hv_reference().unwrap(), vec![1.1; 3]);
    }
}
