//! MOEA/D over a set of scalar maximization subproblems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, sbx_crossover};
use super::EaConfig;

/// A family of scalar subproblems (to be maximized) that share one expensive
/// per-point preparation step, e.g. a surrogate prediction.
pub trait ScalarSubproblems {
    type Prepared;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn prepare(&self, x: &[f64]) -> Self::Prepared;

    fn score(&self, prepared: &Self::Prepared, subproblem: usize) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemBest {
    pub x: Vec<f64>,
    pub value: f64,
}

/// `max(2, ceil(n / 10))`, capped at `n`.
pub fn moead_neighborhood_size(n: usize) -> usize {
    n.div_ceil(10).max(2).min(n)
}

fn neighborhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|wi| {
            let mut idx: Vec<usize> = (0..weights.len()).collect();
            let dist = |j: usize| -> f64 {
                wi.iter()
                    .zip(&weights[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum()
            };
            idx.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
            idx.truncate(t);
            idx
        })
        .collect()
}

/// Maximizes every subproblem cooperatively.
///
/// `weights[i]` positions subproblem `i` (neighborhoods are the `T` nearest by
/// Euclidean distance) and `init[i]` is its starting solution. Each generation
/// every subproblem breeds one child from two parents drawn from its
/// neighborhood (probability `cfg.delta`) or the whole population; the child
/// replaces at most `cfg.max_replace` incumbents it strictly improves on.
pub fn run_moead<S>(
    subproblems: &S,
    weights: &[Vec<f64>],
    init: Vec<Vec<f64>>,
    lower: &[f64],
    upper: &[f64],
    cfg: &EaConfig,
) -> Vec<SubproblemBest>
where
    S: ScalarSubproblems,
{
    let n = subproblems.len();
    assert_eq!(init.len(), n, "one initial solution per subproblem");
    assert_eq!(weights.len(), n, "one weight vector per subproblem");
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t = cfg
        .neighborhood
        .unwrap_or_else(|| moead_neighborhood_size(n))
        .clamp(1, n);
    let hoods = neighborhoods(weights, t);
    let p_m = cfg.mutation_probability(lower.len());

    let mut best: Vec<SubproblemBest> = init
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let prepared = subproblems.prepare(&x);
            let value = subproblems.score(&prepared, i);
            SubproblemBest { x, value }
        })
        .collect();

    let all: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..cfg.generations {
        order.shuffle(&mut rng);
        for &i in &order {
            let pool: &[usize] = if rng.random::<f64>() < cfg.delta {
                &hoods[i]
            } else {
                &all
            };
            let a = pool[rng.random_range(0..pool.len())];
            let b = if pool.len() > 1 {
                loop {
                    let b = pool[rng.random_range(0..pool.len())];
                    if b != a {
                        break b;
                    }
                }
            } else {
                a
            };
            let (mut child, _) = sbx_crossover(
                &best[a].x, &best[b].x, lower, upper, cfg.eta_c, cfg.p_c, &mut rng,
            );
            polynomial_mutation(&mut child, lower, upper, cfg.eta_m, p_m, &mut rng);
            let prepared = subproblems.prepare(&child);

            let mut candidates = pool.to_vec();
            candidates.shuffle(&mut rng);
            let mut replaced = 0;
            for j in candidates {
                if replaced >= cfg.max_replace {
                    break;
                }
                let value = subproblems.score(&prepared, j);
                if value > best[j].value {
                    best[j] = SubproblemBest {
                        x: child.clone(),
                        value,
                    };
                    replaced += 1;
                }
            }
        }
    }
    best
}
