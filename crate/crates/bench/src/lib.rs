//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srva_core::doe::latin_hypercube;
use srva_core::{Dtlz, DtlzKind, Problem};

/// Latin-hypercube design on DTLZ2 with its objective values.
pub fn dtlz2_samples(
    n: usize,
    n_obj: usize,
    n_var: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let problem = Dtlz::new(DtlzKind::Dtlz2, n_obj, n_var).expect("valid DTLZ2 instance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = latin_hypercube(n, n_var, &mut rng)
        .expect("valid design size")
        .into_rows();
    let f = x
        .iter()
        .map(|xi| problem.evaluate(xi).expect("in-bounds design"))
        .collect();
    (x, f)
}

/// `n` mutually non-dominated points on the positive unit sphere.
pub fn sphere_front(n: usize, n_obj: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..n_obj).map(|_| rng.random::<f64>() + 1e-3).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / norm).collect()
        })
        .collect()
}
