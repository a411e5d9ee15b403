use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, random_point, sbx_crossover};
use super::{EaConfig, Individual};

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if b.fitness < a.fitness {
        b
    } else {
        a
    }
}

/// Generational real-coded GA minimizing `objective` over `[lower, upper]`.
///
/// Binary tournament selection, SBX, polynomial mutation and `cfg.elitism`
/// elites. Non-finite objective values are treated as `+inf`. Returns the
/// best individual ever evaluated.
pub fn run_single_objective_ga<F>(
    objective: F,
    lower: &[f64],
    upper: &[f64],
    cfg: &EaConfig,
) -> Individual
where
    F: Fn(&[f64]) -> f64,
{
    run_single_objective_ga_traced(objective, lower, upper, cfg).0
}

/// Same as [`run_single_objective_ga`], also returning the best-so-far value after each generation.
pub(crate) fn run_single_objective_ga_traced<F>(
    objective: F,
    lower: &[f64],
    upper: &[f64],
    cfg: &EaConfig,
) -> (Individual, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_var = lower.len();
    let pop_size = cfg.population.max(2);
    let p_m = cfg.mutation_probability(n_var);
    let eval = |x: Vec<f64>| {
        let f = objective(&x);
        Individual {
            genes: x,
            fitness: if f.is_nan() { f64::INFINITY } else { f },
        }
    };

    let mut pop: Vec<Individual> = (0..pop_size)
        .map(|_| eval(random_point(lower, upper, &mut rng)))
        .collect();
    let better = |a: &Individual, b: &Individual| a.fitness < b.fitness;
    let mut best = pop
        .iter()
        .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .cloned()
        .expect("population is non-empty");
    let mut trace = Vec::with_capacity(cfg.generations);

    for _ in 0..cfg.generations {
        pop.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        let elites = cfg.elitism.min(pop_size);
        let mut next: Vec<Individual> = pop[..elites].to_vec();
        while next.len() < pop_size {
            let p1 = tournament(&pop, &mut rng);
            let p2 = tournament(&pop, &mut rng);
            let (mut c1, mut c2) = sbx_crossover(
                &p1.genes, &p2.genes, lower, upper, cfg.eta_c, cfg.p_c, &mut rng,
            );
            polynomial_mutation(&mut c1, lower, upper, cfg.eta_m, p_m, &mut rng);
            polynomial_mutation(&mut c2, lower, upper, cfg.eta_m, p_m, &mut rng);
            for c in [c1, c2] {
                if next.len() < pop_size {
                    let ind = eval(c);
                    if better(&ind, &best) {
                        best = ind.clone();
                    }
                    next.push(ind);
                }
            }
        }
        pop = next;
        trace.push(best.fitness);
    }
    (best, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn sphere_converges() {
        let cfg = EaConfig {
            population: 50,
            generations: 100,
            seed: 4,
            ..EaConfig::default()
        };
        let best = run_single_objective_ga(sphere, &[-1.0; 10], &[1.0; 10], &cfg);
        assert!(best.fitness < 1e-2, "best {}", best.fitness);
        assert!((sphere(&best.genes) - best.fitness).abs() < 1e-15);
    }

    #[test]
    fn best_is_monotone() {
        let cfg = EaConfig {
            population: 20,
            generations: 60,
            seed: 8,
            ..EaConfig::default()
        };
        let (_, trace) = run_single_objective_ga_traced(
            |x| (x[0] - 0.3).powi(2) + (5.0 * x[1]).sin(),
            &[0.0; 2],
            &[1.0; 2],
            &cfg,
        );
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn constant_objective() {
        let cfg = EaConfig {
            population: 10,
            generations: 5,
            ..EaConfig::default()
        };
        let best = run_single_objective_ga(|_| 7.5, &[0.0; 3], &[1.0; 3], &cfg);
        assert_eq!(best.fitness, 7.5);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = EaConfig {
            population: 16,
            generations: 20,
            seed: 21,
            ..EaConfig::default()
        };
        let a = run_single_objective_ga(sphere, &[-1.0; 4], &[1.0; 4], &cfg);
        let b = run_single_objective_ga(sphere, &[-1.0; 4], &[1.0; 4], &cfg);
        assert_eq!(a, b);
    }
}
