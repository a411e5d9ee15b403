//! Latin hypercube designs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// `n` points in the unit hypercube, one per stratum in every column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Vec<Vec<f64>>,
}

impl DesignMatrix {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_points(&self) -> usize {
        self.rows.len()
    }

    /// Maps the unit-cube design affinely onto `[lower, upper]`.
    pub fn scaled(&self, lower: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&u, (&lo, &hi))| (lo + u * (hi - lo)).clamp(lo, hi))
                    .collect()
            })
            .collect()
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }
}

/// Plain Latin hypercube: an independent stratum permutation per column and
/// a uniform offset inside each stratum.
pub fn latin_hypercube<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<DesignMatrix> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidInput(format!(
            "latin hypercube needs n >= 1 and m >= 1 (got n = {n}, m = {m})"
        )));
    }
    let mut rows = vec![vec![0.0; m]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..m {
        strata.shuffle(rng);
        for (row, &s) in rows.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            // Keep the value strictly inside its stratum.
            row[j] = ((s as f64 + u) / n as f64).min((s as f64 + 1.0) / n as f64 - f64::EPSILON);
        }
    }
    Ok(DesignMatrix { rows })
}
