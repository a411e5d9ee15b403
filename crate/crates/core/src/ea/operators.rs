//! Real-coded variation operators: simulated binary crossover and polynomial mutation.

use rand::Rng;

/// Bounded simulated binary crossover. Each gene is recombined with probability 0.5
/// once the pair is selected for crossover (probability `p_c`).
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    lower: &[f64],
    upper: &[f64],
    eta_c: f64,
    p_c: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if p_c <= 0.0 || rng.random::<f64>() > p_c {
        return (c1, c2);
    }
    for i in 0..p1.len() {
        if rng.random::<f64>() > 0.5 {
            continue;
        }
        let (a, b) = (p1[i], p2[i]);
        if (a - b).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if a < b { (a, b) } else { (b, a) };
        let (yl, yu) = (lower[i], upper[i]);
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta_c + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta_c + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta_c + 1.0))
            }
        };
        let beta_q1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
        let beta_q2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
        let mut v1 = (0.5 * ((y1 + y2) - beta_q1 * (y2 - y1))).clamp(yl, yu);
        let mut v2 = (0.5 * ((y1 + y2) + beta_q2 * (y2 - y1))).clamp(yl, yu);
        if rng.random::<f64>() < 0.5 {
            std::mem::swap(&mut v1, &mut v2);
        }
        c1[i] = v1;
        c2[i] = v2;
    }
    (c1, c2)
}

/// Bounded polynomial mutation applied gene-wise with probability `p_m`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &mut [f64],
    lower: &[f64],
    upper: &[f64],
    eta_m: f64,
    p_m: f64,
    rng: &mut R,
) {
    let pow = 1.0 / (eta_m + 1.0);
    for i in 0..x.len() {
        if rng.random::<f64>() >= p_m {
            continue;
        }
        let (yl, yu) = (lower[i], upper[i]);
        let span = yu - yl;
        if span <= 0.0 {
            continue;
        }
        let y = x[i];
        let d1 = (y - yl) / span;
        let d2 = (yu - y) / span;
        let r: f64 = rng.random();
        let dq = if r < 0.5 {
            let v = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta_m + 1.0);
            v.powf(pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta_m + 1.0);
            1.0 - v.powf(pow)
        };
        x[i] = (y + dq * span).clamp(yl, yu);
    }
}

pub fn random_point<R: Rng + ?Sized>(lower: &[f64], upper: &[f64], rng: &mut R) -> Vec<f64> {
    lower
        .iter()
        .zip(upper)
        .map(|(&lo, &hi)| lo + rng.random::<f64>() * (hi - lo))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_crossover_when_disabled() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p1 = vec![0.1, 0.2, 0.3];
        let p2 = vec![0.9, 0.8, 0.7];
        let (c1, c2) = sbx_crossover(&p1, &p2, &[0.0; 3], &[1.0; 3], 15.0, 0.0, &mut rng);
        assert_eq!(c1, p1);
        assert_eq!(c2, p2);
    }

    #[test]
    fn identical_parents_are_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = vec![0.4, 0.6];
        for _ in 0..100 {
            let (c1, c2) = sbx_crossover(&p, &p, &[0.0; 2], &[1.0; 2], 15.0, 1.0, &mut rng);
            assert_eq!(c1, p);
            assert_eq!(c2, p);
        }
    }

    #[test]
    fn children_center_on_parent_midpoint() {
        // Parents symmetric inside [0, 1] so bounded SBX is symmetric about the midpoint.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p1 = vec![0.3, 0.45];
        let p2 = vec![0.7, 0.55];
        let n = 10_000;
        let mut sum = [0.0; 2];
        let mut sum_sq = [0.0; 2];
        for _ in 0..n {
            let (c1, c2) = sbx_crossover(&p1, &p2, &[0.0; 2], &[1.0; 2], 15.0, 1.0, &mut rng);
            for g in 0..2 {
                for v in [c1[g], c2[g]] {
                    sum[g] += v;
                    sum_sq[g] += v * v;
                }
            }
        }
        let count = 2.0 * n as f64;
        for g in 0..2 {
            let mean = sum[g] / count;
            let var = sum_sq[g] / count - mean * mean;
            let se = (var / count).sqrt();
            let mid = 0.5 * (p1[g] + p2[g]);
            assert!(
                (mean - mid).abs() < 3.0 * se,
                "gene {g}: {mean} vs {mid} (se {se})"
            );
        }
    }

    #[test]
    fn operators_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let lower = [-2.0, 0.0, 5.0];
        let upper = [3.0, 1e-3, 6.0];
        for _ in 0..100_000 {
            let p1 = random_point(&lower, &upper, &mut rng);
            let p2 = random_point(&lower, &upper, &mut rng);
            let (mut c1, mut c2) = sbx_crossover(&p1, &p2, &lower, &upper, 2.0, 1.0, &mut rng);
            polynomial_mutation(&mut c1, &lower, &upper, 5.0, 1.0, &mut rng);
            polynomial_mutation(&mut c2, &lower, &upper, 5.0, 1.0, &mut rng);
            for c in [&c1, &c2] {
                for ((&v, &lo), &hi) in c.iter().zip(&lower).zip(&upper) {
                    assert!(v >= lo && v <= hi);
                }
            }
        }
    }
}
