//! NSGA-III with reference-point niching.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{polynomial_mutation, random_point, sbx_crossover};
use super::EaConfig;
use crate::linalg::solve_dense;
use crate::pareto::nondominated_sort;

/// Non-dominated members of the final NSGA-III population.
#[derive(Debug, Clone, PartialEq)]
pub struct Nsga3Output {
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

/// Population size for `n_ref` reference directions: rounded up to a multiple of four.
pub fn nsga3_population_size(n_ref: usize) -> usize {
    n_ref.div_ceil(4).max(1) * 4
}

struct Normalizer {
    ideal: Vec<f64>,
    extremes: Vec<Vec<f64>>,
}

impl Normalizer {
    fn new(m: usize) -> Self {
        Self {
            ideal: vec![f64::INFINITY; m],
            extremes: Vec::new(),
        }
    }

    /// Returns the intercepts of the hyperplane through the extreme points of `members`.
    fn update(&mut self, members: &[&Vec<f64>]) -> Vec<f64> {
        let m = self.ideal.len();
        for f in members {
            for k in 0..m {
                self.ideal[k] = self.ideal[k].min(f[k]);
            }
        }
        let mut pool: Vec<Vec<f64>> = members.iter().map(|f| (*f).clone()).collect();
        pool.append(&mut self.extremes);
        let translated: Vec<Vec<f64>> = pool
            .iter()
            .map(|f| f.iter().zip(&self.ideal).map(|(v, z)| v - z).collect())
            .collect();

        let mut extremes = Vec::with_capacity(m);
        let mut extreme_translated = Vec::with_capacity(m);
        for axis in 0..m {
            let asf = |f: &Vec<f64>| {
                f.iter()
                    .enumerate()
                    .map(|(k, &v)| if k == axis { v } else { v / 1e-6 })
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let best = (0..translated.len())
                .min_by(|&a, &b| asf(&translated[a]).total_cmp(&asf(&translated[b])))
                .expect("normalization needs members");
            extremes.push(pool[best].clone());
            extreme_translated.push(translated[best].clone());
        }
        self.extremes = extremes;

        let worst: Vec<f64> = (0..m)
            .map(|k| {
                members
                    .iter()
                    .map(|f| f[k] - self.ideal[k])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let hyperplane = solve_dense(extreme_translated, vec![1.0; m]);
        (0..m)
            .map(|k| {
                let from_plane = hyperplane.as_ref().map(|b| 1.0 / b[k]);
                match from_plane {
                    Some(a) if a.is_finite() && a > 1e-6 => a,
                    _ if worst[k] > 1e-12 => worst[k],
                    _ => 1.0,
                }
            })
            .collect()
    }
}

fn associate(f: &[f64], ideal: &[f64], intercepts: &[f64], dirs: &[Vec<f64>]) -> (usize, f64) {
    let norm: Vec<f64> = f
        .iter()
        .zip(ideal.iter().zip(intercepts))
        .map(|(&v, (&z, &a))| (v - z) / a)
        .collect();
    let sq: f64 = norm.iter().map(|v| v * v).sum();
    let mut best = (0, f64::INFINITY);
    for (j, d) in dirs.iter().enumerate() {
        let proj: f64 = norm.iter().zip(d).map(|(a, b)| a * b).sum();
        let dist = (sq - proj * proj).max(0.0);
        if dist < best.1 {
            best = (j, dist);
        }
    }
    (best.0, best.1.sqrt())
}

/// Environmental selection on `combined`: returns indices of the `n` survivors.
fn survive<R: Rng + ?Sized>(
    f: &[Vec<f64>],
    n: usize,
    dirs: &[Vec<f64>],
    normalizer: &mut Normalizer,
    rng: &mut R,
) -> Vec<usize> {
    let ranks = nondominated_sort(f);
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let mut fronts: Vec<Vec<usize>> = vec![Vec::new(); max_rank];
    for (i, &r) in ranks.iter().enumerate() {
        fronts[r - 1].push(i);
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut last = Vec::new();
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            if chosen.len() == n {
                break;
            }
        } else {
            last = front;
            break;
        }
    }
    let members: Vec<&Vec<f64>> = chosen.iter().chain(&last).map(|&i| &f[i]).collect();
    let intercepts = normalizer.update(&members);
    if last.is_empty() {
        return chosen;
    }

    let mut niche_count = vec![0usize; dirs.len()];
    for &i in &chosen {
        niche_count[associate(&f[i], &normalizer.ideal, &intercepts, dirs).0] += 1;
    }
    let mut niche_members: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dirs.len()];
    for &i in &last {
        let (j, d) = associate(&f[i], &normalizer.ideal, &intercepts, dirs);
        niche_members[j].push((i, d));
    }
    let mut remaining = n - chosen.len();
    let mut open: Vec<usize> = (0..dirs.len())
        .filter(|&j| !niche_members[j].is_empty())
        .collect();
    while remaining > 0 && !open.is_empty() {
        let min_count = open
            .iter()
            .map(|&j| niche_count[j])
            .min()
            .expect("open niches");
        let ties: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&j| niche_count[j] == min_count)
            .collect();
        let j = *ties.choose(rng).expect("non-empty ties");
        let members = &mut niche_members[j];
        let pick = if niche_count[j] == 0 {
            (0..members.len())
                .min_by(|&a, &b| members[a].1.total_cmp(&members[b].1))
                .expect("niche has members")
        } else {
            rng.random_range(0..members.len())
        };
        let (idx, _) = members.swap_remove(pick);
        chosen.push(idx);
        niche_count[j] += 1;
        remaining -= 1;
        if members.is_empty() {
            open.retain(|&o| o != j);
        }
    }
    chosen
}

/// Runs NSGA-III on `objectives` with fixed reference directions.
///
/// The population size is the reference-direction count rounded up to a
/// multiple of four. Returns the rank-1 members of the final population
/// together with their objective vectors.
pub fn run_nsga3<F>(
    objectives: F,
    lower: &[f64],
    upper: &[f64],
    ref_dirs: &[Vec<f64>],
    cfg: &EaConfig,
) -> Nsga3Output
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = nsga3_population_size(ref_dirs.len());
    let n_var = lower.len();
    let p_m = cfg.mutation_probability(n_var);
    let dirs: Vec<Vec<f64>> = ref_dirs
        .iter()
        .map(|d| {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter().map(|v| v / norm).collect()
        })
        .collect();

    let mut x: Vec<Vec<f64>> = (0..n)
        .map(|_| random_point(lower, upper, &mut rng))
        .collect();
    let mut f: Vec<Vec<f64>> = x.iter().map(|xi| objectives(xi)).collect();
    let m = f.first().map_or(0, Vec::len);
    let mut normalizer = Normalizer::new(m);
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..cfg.generations {
        order.shuffle(&mut rng);
        let mut children = Vec::with_capacity(n);
        for pair in order.chunks(2) {
            let (a, b) = (pair[0], pair[pair.len() - 1]);
            let (mut c1, mut c2) =
                sbx_crossover(&x[a], &x[b], lower, upper, cfg.eta_c, cfg.p_c, &mut rng);
            polynomial_mutation(&mut c1, lower, upper, cfg.eta_m, p_m, &mut rng);
            polynomial_mutation(&mut c2, lower, upper, cfg.eta_m, p_m, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        children.truncate(n);
        let child_f: Vec<Vec<f64>> = children.iter().map(|c| objectives(c)).collect();
        x.extend(children);
        f.extend(child_f);
        let keep = survive(&f, n, &dirs, &mut normalizer, &mut rng);
        x = keep.iter().map(|&i| x[i].clone()).collect();
        f = keep.iter().map(|&i| f[i].clone()).collect();
    }

    let ranks = nondominated_sort(&f);
    let (x, f): (Vec<_>, Vec<_>) = x
        .into_iter()
        .zip(f)
        .zip(ranks)
        .filter(|(_, r)| *r == 1)
        .map(|(xf, _)| xf)
        .unzip();
    Nsga3Output { x, f }
}
