//! Surrogate-assisted reference-vector adaptation.
//!
//! Reference solutions are picked greedily from the estimated front (in
//! nadir/utopia-normalized space) so that each pick is as far as possible
//! from the samples already evaluated and from the earlier picks. The picks
//! are clustered with k-means into one group per infill point and turned
//! into unit vectors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pareto::two_layer_sld;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorSource {
    Adaptive,
    Sld,
}

/// Unit reference vectors with their cluster labels (`0..n_clusters`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceVectorSet {
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_clusters: usize,
    pub source: VectorSource,
}

impl ReferenceVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn n_obj(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// CSV dump: one vector per row followed by its cluster label.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (v, l) in self.vectors.iter().zip(&self.labels) {
            for c in v {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&format!("{l}\n"));
        }
        out
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Result of the greedy max-min selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSelection {
    pub points: Vec<Vec<f64>>,
    /// Index into the candidate set for every pick.
    pub candidate_indices: Vec<usize>,
    /// Min-distance of each greedy pick at the time it was chosen.
    pub pick_distances: Vec<f64>,
    /// Number of trailing entries filled by cycling through earlier picks.
    pub shortfall: usize,
}

/// Greedy max-min selection of `n_ref` candidates against `samples ∪ picks`.
///
/// Ties go to the lowest candidate index. With fewer candidates than `n_ref`
/// the remaining slots repeat earlier picks in order. Returns `None` when
/// there are no candidates.
pub fn select_reference_solutions(
    candidates: &[Vec<f64>],
    samples: &[Vec<f64>],
    n_ref: usize,
) -> Option<ReferenceSelection> {
    if candidates.is_empty() {
        return None;
    }
    let mut min_dist: Vec<f64> = candidates
        .iter()
        .map(|c| {
            samples
                .iter()
                .map(|s| distance(c, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut taken = vec![false; candidates.len()];
    let mut selection = ReferenceSelection {
        points: Vec::with_capacity(n_ref),
        candidate_indices: Vec::with_capacity(n_ref),
        pick_distances: Vec::with_capacity(n_ref),
        shortfall: 0,
    };
    let greedy = n_ref.min(candidates.len());
    for _ in 0..greedy {
        let mut best: Option<usize> = None;
        for j in 0..candidates.len() {
            if taken[j] {
                continue;
            }
            if best.is_none_or(|b| min_dist[j] > min_dist[b]) {
                best = Some(j);
            }
        }
        let b = best.expect("an untaken candidate remains");
        taken[b] = true;
        selection.pick_distances.push(min_dist[b]);
        selection.points.push(candidates[b].clone());
        selection.candidate_indices.push(b);
        for j in 0..candidates.len() {
            if !taken[j] {
                min_dist[j] = min_dist[j].min(distance(&candidates[j], &candidates[b]));
            }
        }
    }
    let mut k = 0;
    while selection.points.len() < n_ref {
        selection.points.push(selection.points[k].clone());
        selection
            .candidate_indices
            .push(selection.candidate_indices[k]);
        selection.shortfall += 1;
        k += 1;
    }
    if selection.shortfall > 0 {
        log::warn!(
            "only {} estimated-front points for {} reference vectors; {} repeated",
            candidates.len(),
            n_ref,
            selection.shortfall
        );
    }
    Some(selection)
}

pub const KMEANS_MAX_ITER: usize = 100;
pub const KMEANS_TOL: f64 = 1e-6;

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, cen)| (c, sq_distance(p, cen)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

fn kmeans_plus_plus<R: Rng + ?Sized>(data: &[&Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![data[rng.random_range(0..data.len())].clone()];
    while centroids.len() < k {
        let d2: Vec<f64> = data.iter().map(|p| nearest(p, &centroids).1).collect();
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = data.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..data.len())
        };
        centroids.push(data[idx].clone());
    }
    centroids
}

fn lloyd<R: Rng + ?Sized>(data: &[&Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let m = data[0].len();
    let mut centroids = kmeans_plus_plus(data, k, rng);
    for _ in 0..KMEANS_MAX_ITER {
        let assign: Vec<usize> = data.iter().map(|p| nearest(p, &centroids).0).collect();
        let mut sums = vec![vec![0.0; m]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in data.iter().zip(&assign) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        let mut next: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                if counts[c] > 0 {
                    sums[c].iter().map(|s| s / counts[c] as f64).collect()
                } else {
                    centroids[c].clone()
                }
            })
            .collect();
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed at the point farthest from its nearest centroid.
                let far = (0..data.len())
                    .max_by(|&a, &b| {
                        nearest(data[a], &next)
                            .1
                            .total_cmp(&nearest(data[b], &next).1)
                    })
                    .expect("data is non-empty");
                next[c] = data[far].clone();
            }
        }
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| distance(a, b))
            .fold(0.0, f64::max);
        centroids = next;
        if shift < KMEANS_TOL {
            break;
        }
    }
    centroids
}

fn inside_unit_box(p: &[f64]) -> bool {
    p.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v))
}

/// Within-cluster sum of squared distances to the label means.
pub fn within_cluster_ss(points: &[Vec<f64>], labels: &[usize], n_clusters: usize) -> f64 {
    let m = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; m]; n_clusters];
    let mut counts = vec![0usize; n_clusters];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| {
            let mean: Vec<f64> = sums[l].iter().map(|s| s / counts[l] as f64).collect();
            sq_distance(p, &mean)
        })
        .sum()
}

/// Clusters normalized points into `n_clusters` groups.
///
/// Centroids are fitted only on points inside the unit (nadir/utopia) box;
/// points outside are assigned to the nearest centroid afterwards. When
/// fewer than `n_clusters` points lie inside, the farthest outside points are
/// added to the fitting set. Every label is used whenever
/// `points.len() >= n_clusters`.
pub fn cluster_reference_solutions<R: Rng + ?Sized>(
    points: &[Vec<f64>],
    n_clusters: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert!(n_clusters >= 1, "at least one cluster");
    if points.is_empty() {
        return Vec::new();
    }
    if n_clusters == 1 {
        return vec![0; points.len()];
    }
    let k = n_clusters.min(points.len());
    let mut fit_idx: Vec<usize> = (0..points.len())
        .filter(|&i| inside_unit_box(&points[i]))
        .collect();
    let mut outside: Vec<usize> = (0..points.len())
        .filter(|&i| !inside_unit_box(&points[i]))
        .collect();
    while fit_idx.len() < k {
        let far = if fit_idx.is_empty() {
            0
        } else {
            (0..outside.len())
                .max_by(|&a, &b| {
                    let da = fit_idx
                        .iter()
                        .map(|&f| sq_distance(&points[outside[a]], &points[f]))
                        .fold(f64::INFINITY, f64::min);
                    let db = fit_idx
                        .iter()
                        .map(|&f| sq_distance(&points[outside[b]], &points[f]))
                        .fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db).then(b.cmp(&a))
                })
                .expect("enough points overall")
        };
        fit_idx.push(outside.remove(far));
    }
    let data: Vec<&Vec<f64>> = fit_idx.iter().map(|&i| &points[i]).collect();
    let centroids = lloyd(&data, k, rng);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();

    // Empty labels (duplicate points) take the farthest member of the largest cluster.
    loop {
        let mut counts = vec![0usize; n_clusters];
        for &l in &labels {
            counts[l] += 1;
        }
        let Some(empty) = (0..k).find(|&c| counts[c] == 0) else {
            break;
        };
        let largest = (0..n_clusters)
            .max_by_key(|&c| (counts[c], std::cmp::Reverse(c)))
            .expect("clusters");
        if counts[largest] < 2 {
            break;
        }
        let donor = (0..points.len())
            .filter(|&i| labels[i] == largest)
            .max_by(|&a, &b| {
                sq_distance(&points[a], &centroids[largest])
                    .total_cmp(&sq_distance(&points[b], &centroids[largest]))
                    .then(a.cmp(&b))
            })
            .expect("largest cluster has members");
        labels[donor] = empty;
    }
    labels
}

/// Scales each point to unit length. Negative components are clipped to zero
/// first; zero vectors become the uniform direction.
pub fn to_unit_vectors(
    points: &[Vec<f64>],
    labels: &[usize],
    n_clusters: usize,
    source: VectorSource,
) -> ReferenceVectorSet {
    let vectors = points
        .iter()
        .map(|p| {
            let clipped: Vec<f64> = p.iter().map(|&v| v.max(0.0)).collect();
            let norm = clipped.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-9 {
                log::warn!("zero reference vector replaced by the uniform direction");
                vec![1.0 / (p.len() as f64).sqrt(); p.len()]
            } else {
                clipped.into_iter().map(|v| v / norm).collect()
            }
        })
        .collect();
    ReferenceVectorSet {
        vectors,
        labels: labels.to_vec(),
        n_clusters,
        source,
    }
}

/// Adaptive reference vectors from the normalized estimated front and samples.
pub fn adaptive_reference_vectors<R: Rng + ?Sized>(
    front_norm: &[Vec<f64>],
    samples_norm: &[Vec<f64>],
    n_ref: usize,
    n_clusters: usize,
    rng: &mut R,
) -> Option<(ReferenceVectorSet, ReferenceSelection)> {
    let selection = select_reference_solutions(front_norm, samples_norm, n_ref)?;
    let labels = cluster_reference_solutions(&selection.points, n_clusters, rng);
    let set = to_unit_vectors(
        &selection.points,
        &labels,
        n_clusters,
        VectorSource::Adaptive,
    );
    Some((set, selection))
}

/// Fixed two-layer simplex-lattice vectors, clustered on the simplex.
pub fn sld_reference_vectors<R: Rng + ?Sized>(
    n_obj: usize,
    h1: usize,
    h2: usize,
    n_clusters: usize,
    rng: &mut R,
) -> ReferenceVectorSet {
    let simplex = two_layer_sld(n_obj, h1, h2).vectors;
    let labels = cluster_reference_solutions(&simplex, n_clusters, rng);
    to_unit_vectors(&simplex, &labels, n_clusters, VectorSource::Sld)
}
