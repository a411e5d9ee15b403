//! Pareto tooling: dominance, non-dominated sorting, ε-dominance pruning of
//! weak fronts, nadir/utopia estimation, normalization and simplex-lattice
//! reference vectors.

use serde::{Deserialize, Serialize};

/// `a` Pareto-dominates `b` (minimization).
#[inline]
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Front rank per point, `1` for the non-dominated set.
pub fn nondominated_sort(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    let mut r = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = r;
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        r += 1;
    }
    rank
}

/// Indices of the non-dominated points, in input order.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect()
}

/// Per-objective min/max used for the tentative normalization of an estimated front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TentativeScale {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl TentativeScale {
    pub fn of(points: &[Vec<f64>]) -> Self {
        let m = points.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; m];
        let mut max = vec![f64::NEG_INFINITY; m];
        for p in points {
            for k in 0..m {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Self { min, max }
    }

    pub fn range(&self, k: usize) -> f64 {
        self.max[k] - self.min[k]
    }

    fn effective_range(&self, k: usize) -> f64 {
        let r = self.range(k);
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }

    pub fn normalize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .enumerate()
            .map(|(k, &v)| (v - self.min[k]) / self.effective_range(k))
            .collect()
    }
}

/// Survivors of the ε-dominance sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonFiltered {
    /// Indices into the input set, in input order.
    pub indices: Vec<usize>,
    pub scale: TentativeScale,
}

impl EpsilonFiltered {
    pub fn points<'a>(&self, input: &'a [Vec<f64>]) -> Vec<&'a Vec<f64>> {
        self.indices.iter().map(|&i| &input[i]).collect()
    }
}

/// Removes weakly Pareto-optimal members with one sweep in insertion order.
///
/// Points are normalized by the set's min/max. A point is dropped when some
/// other surviving point, shifted down by `eps` in every objective,
/// dominates it.
pub fn epsilon_dominance_filter(points: &[Vec<f64>], eps: f64) -> EpsilonFiltered {
    let scale = TentativeScale::of(points);
    let normalized: Vec<Vec<f64>> = points.iter().map(|p| scale.normalize(p)).collect();
    let mut alive = vec![true; points.len()];
    let mut shifted = vec![0.0; scale.min.len()];
    for i in 0..points.len() {
        let dropped = (0..points.len()).any(|j| {
            if j == i || !alive[j] {
                return false;
            }
            for (s, &v) in shifted.iter_mut().zip(&normalized[j]) {
                *s = v - eps;
            }
            dominates(&shifted, &normalized[i])
        });
        if dropped {
            alive[i] = false;
        }
    }
    EpsilonFiltered {
        indices: (0..points.len()).filter(|&i| alive[i]).collect(),
        scale,
    }
}

/// Estimated nadir and utopia points in original objective units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NadirUtopia {
    pub nadir: Vec<f64>,
    pub utopia: Vec<f64>,
}

impl NadirUtopia {
    pub fn n_obj(&self) -> usize {
        self.nadir.len()
    }

    pub fn normalize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(self.utopia.iter().zip(&self.nadir))
            .map(|(&v, (&u, &n))| (v - u) / (n - u))
            .collect()
    }

    pub fn denormalize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(self.utopia.iter().zip(&self.nadir))
            .map(|(&v, (&u, &n))| u + v * (n - u))
            .collect()
    }

    pub fn normalize_all(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points.iter().map(|p| self.normalize(p)).collect()
    }
}

/// Nadir/utopia from the ε-filtered set: per-objective max + `eps` and min − `eps`
/// in the tentative normalized space, mapped back to original units.
///
/// When the tentative range of an objective is zero, `fallback_range[k]` (or
/// `1.0` if it is absent or also zero) stands in for it.
pub fn estimate_nadir_utopia(
    filtered: &[&Vec<f64>],
    scale: &TentativeScale,
    eps: f64,
    fallback_range: Option<&[f64]>,
) -> NadirUtopia {
    assert!(
        !filtered.is_empty(),
        "nadir/utopia estimation needs at least one point"
    );
    let m = scale.min.len();
    let mut nadir = vec![0.0; m];
    let mut utopia = vec![0.0; m];
    for k in 0..m {
        let range = scale.range(k);
        let (lo, hi) = filtered
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[k]), hi.max(p[k]))
            });
        if range > 0.0 {
            let lo_n = (lo - scale.min[k]) / range - eps;
            let hi_n = (hi - scale.min[k]) / range + eps;
            utopia[k] = scale.min[k] + lo_n * range;
            nadir[k] = scale.min[k] + hi_n * range;
        } else {
            let fallback = fallback_range
                .and_then(|r| r.get(k).copied())
                .filter(|&r| r > 0.0 && r.is_finite())
                .unwrap_or(1.0);
            utopia[k] = lo - eps * fallback;
            nadir[k] = hi + eps * fallback;
        }
    }
    NadirUtopia { nadir, utopia }
}

/// Simplex-lattice reference vectors, optionally with an inner layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SldVectorSet {
    pub vectors: Vec<Vec<f64>>,
    pub h1: usize,
    pub h2: usize,
}

impl SldVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `C(n, k)` as `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of vectors produced by [`two_layer_sld`].
pub fn sld_count(m: usize, h1: usize, h2: usize) -> usize {
    let outer = binomial(h1 + m - 1, m - 1);
    let inner = if h2 > 0 {
        binomial(h2 + m - 1, m - 1)
    } else {
        0
    };
    (outer + inner) as usize
}

fn compositions(m: usize, h: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
    if prefix.len() == m - 1 {
        let used: usize = prefix.iter().sum();
        let mut v: Vec<f64> = prefix.iter().map(|&c| c as f64 / h as f64).collect();
        v.push((h - used) as f64 / h as f64);
        out.push(v);
        return;
    }
    let used: usize = prefix.iter().sum();
    for c in (0..=h - used).rev() {
        prefix.push(c);
        compositions(m, h, prefix, out);
        prefix.pop();
    }
}

/// All weight vectors with components in `{0, 1/h, ..., 1}` summing to one.
pub fn sld_vectors(m: usize, h: usize) -> SldVectorSet {
    assert!(m >= 1 && h >= 1, "simplex lattice needs m >= 1 and h >= 1");
    let mut out = Vec::new();
    compositions(m, h, &mut Vec::with_capacity(m), &mut out);
    SldVectorSet {
        vectors: out,
        h1: h,
        h2: 0,
    }
}

/// Outer lattice with `h1` divisions plus an inner lattice with `h2` divisions
/// shrunk halfway toward the centroid.
pub fn two_layer_sld(m: usize, h1: usize, h2: usize) -> SldVectorSet {
    let mut set = sld_vectors(m, h1);
    if h2 > 0 {
        let centroid = 1.0 / m as f64;
        let inner = sld_vectors(m, h2);
        set.vectors.extend(inner.vectors.into_iter().map(|w| {
            w.into_iter()
                .map(|v| 0.5 * (v + centroid))
                .collect::<Vec<_>>()
        }));
    }
    set.h2 = h2;
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Peel-off oracle: repeatedly remove the points no remaining point dominates.
    fn brute_force_ranks(points: &[Vec<f64>]) -> Vec<usize> {
        let mut rank = vec![0; points.len()];
        let mut remaining: Vec<usize> = (0..points.len()).collect();
        let mut r = 1;
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| j != i && dominates(&points[j], &points[i]))
                })
                .collect();
            for &i in &front {
                rank[i] = r;
            }
            remaining.retain(|i| !front.contains(i));
            r += 1;
        }
        rank
    }

    #[test]
    fn small_sorts() {
        assert_eq!(
            nondominated_sort(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
            vec![1, 1]
        );
        assert_eq!(
            nondominated_sort(&[vec![0.0, 0.0], vec![1.0, 1.0]]),
            vec![1, 2]
        );
        assert!(nondominated_sort(&[]).is_empty());
    }

    #[test]
    fn sort_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> = (0..50)
                .map(|_| {
                    (0..3)
                        .map(|_| (rng.random::<f64>() * 5.0).floor())
                        .collect()
                })
                .collect();
            assert_eq!(nondominated_sort(&pts), brute_force_ranks(&pts));
        }
    }

    proptest! {
        #[test]
        fn sort_is_permutation_invariant(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..30)
                .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
                .collect();
            let ranks = nondominated_sort(&pts);
            let mut order: Vec<usize> = (0..pts.len()).collect();
            order.shuffle(&mut rng);
            let shuffled: Vec<Vec<f64>> = order.iter().map(|&i| pts[i].clone()).collect();
            let shuffled_ranks = nondominated_sort(&shuffled);
            for (pos, &i) in order.iter().enumerate() {
                prop_assert_eq!(shuffled_ranks[pos], ranks[i]);
            }
        }

        #[test]
        fn normalize_round_trip(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let nu = NadirUtopia { nadir: vec![3.0, 11.0], utopia: vec![-1.0, 2.5] };
            let f = vec![a, b];
            let back = nu.denormalize(&nu.normalize(&f));
            prop_assert!((back[0] - a).abs() < 1e-12 && (back[1] - b).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_drops_weak_point() {
        let pts = vec![vec![0.0, 1.0], vec![0.0, 0.2]];
        // Tentative normalization turns these into (0, 1) and (0, 0).
        let filtered = epsilon_dominance_filter(&pts, 0.01);
        assert_eq!(filtered.indices, vec![1]);
    }

    #[test]
    fn epsilon_keeps_spread_pair() {
        let pts = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(epsilon_dominance_filter(&pts, 0.01).indices, vec![0, 1]);
        let single = vec![vec![0.4, 0.4]];
        assert_eq!(epsilon_dominance_filter(&single, 0.01).indices, vec![0]);
    }

    /// Order-independent variant: every candidate is tested against all ε-shifted
    /// others at once. The sequential sweep keeps a superset of its survivors.
    fn order_independent_filter(points: &[Vec<f64>], eps: f64) -> Vec<usize> {
        let scale = TentativeScale::of(points);
        let n: Vec<Vec<f64>> = points.iter().map(|p| scale.normalize(p)).collect();
        (0..points.len())
            .filter(|&i| {
                !(0..points.len()).any(|j| {
                    j != i && dominates(&n[j].iter().map(|v| v - eps).collect::<Vec<_>>(), &n[i])
                })
            })
            .collect()
    }

    #[test]
    fn epsilon_filter_vs_order_independent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut discrepancies = 0;
        for _ in 0..30 {
            // Points on a linear front plus weak-front tails along each axis.
            let mut pts: Vec<Vec<f64>> = (0..20)
                .map(|_| {
                    let t: f64 = rng.random();
                    vec![t, 1.0 - t]
                })
                .collect();
            pts.push(vec![0.0, 1.0]);
            pts.push(vec![1.0, 0.0]);
            for _ in 0..5 {
                let s: f64 = rng.random();
                pts.push(vec![0.0, 1.0 + s]);
                pts.push(vec![1.0 + s, 0.0]);
            }
            let seq = epsilon_dominance_filter(&pts, 0.01);
            let oracle = order_independent_filter(&pts, 0.01);
            assert!(!seq.indices.is_empty());
            for i in &oracle {
                assert!(seq.indices.contains(i));
            }
            // Tails more than a few eps beyond the front never survive the oracle.
            for &i in &oracle {
                assert!(pts[i][0] <= 1.05 && pts[i][1] <= 1.05, "{:?}", pts[i]);
            }
            if seq.indices != oracle {
                discrepancies += 1;
            }
        }
        eprintln!(
            "epsilon filter: {discrepancies}/30 sets differ from the order-independent oracle"
        );
    }

    #[test]
    fn nadir_utopia_from_unit_extremes() {
        let pts = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let filtered = epsilon_dominance_filter(&pts, 0.01);
        let nu = estimate_nadir_utopia(&filtered.points(&pts), &filtered.scale, 0.01, None);
        for k in 0..2 {
            assert!((nu.nadir[k] - 1.01).abs() < 1e-12);
            assert!((nu.utopia[k] + 0.01).abs() < 1e-12);
        }
        // Scaled objective: range 10 maps eps to 0.1 in original units.
        let pts = vec![vec![0.0, 10.0], vec![1.0, 0.0]];
        let filtered = epsilon_dominance_filter(&pts, 0.01);
        let nu = estimate_nadir_utopia(&filtered.points(&pts), &filtered.scale, 0.01, None);
        assert!((nu.nadir[1] - 10.1).abs() < 1e-12);
        assert!((nu.utopia[1] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn nadir_utopia_degenerate() {
        let pts = vec![vec![0.5, 2.0]];
        let filtered = epsilon_dominance_filter(&pts, 0.01);
        let nu = estimate_nadir_utopia(
            &filtered.points(&pts),
            &filtered.scale,
            0.01,
            Some(&[4.0, 0.0]),
        );
        assert!((nu.nadir[0] - nu.utopia[0] - 2.0 * 0.01 * 4.0).abs() < 1e-12);
        assert!((nu.nadir[1] - nu.utopia[1] - 2.0 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn normalize_endpoints() {
        let nu = NadirUtopia {
            nadir: vec![2.0, 3.0, 4.0],
            utopia: vec![-1.0, 0.0, 1.0],
        };
        assert_eq!(nu.normalize(&nu.utopia), vec![0.0; 3]);
        assert_eq!(nu.normalize(&nu.nadir), vec![1.0; 3]);
    }

    #[test]
    fn sld_counts() {
        assert_eq!(sld_vectors(3, 12).len(), 91);
        assert_eq!(two_layer_sld(6, 3, 3).len(), 112);
        assert_eq!(two_layer_sld(3, 30, 0).len(), 496);
        assert_eq!(two_layer_sld(6, 6, 5).len(), 714);
        let two = sld_vectors(2, 1);
        assert_eq!(two.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        for m in 2..=8 {
            for h in 1..=12 {
                let set = two_layer_sld(m, h, h / 2);
                assert_eq!(set.len(), sld_count(m, h, h / 2), "m={m} h={h}");
                for v in &set.vectors {
                    assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    assert!(v.iter().all(|&c| c >= 0.0));
                }
            }
        }
    }
}
