//! Quality indicators and run-set statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MC_HV_SAMPLES: usize = 1_000_000;
pub const DEFAULT_MC_HV_SEED: u64 = 0x5eed_4a11;

/// How the hypervolume is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HvMethod {
    Exact,
    /// Uniform sampling of the box `[lower, ref]`. With a fixed seed and
    /// lower corner the estimate never decreases as points are added.
    MonteCarlo {
        samples: usize,
        seed: u64,
        lower: Vec<f64>,
    },
}

impl HvMethod {
    /// Exact up to four objectives, otherwise sampling with the default budget.
    pub fn auto(lower: &[f64]) -> Self {
        if lower.len() <= 4 {
            Self::Exact
        } else {
            Self::MonteCarlo {
                samples: DEFAULT_MC_HV_SAMPLES,
                seed: DEFAULT_MC_HV_SEED,
                lower: lower.to_vec(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvEstimate {
    pub value: f64,
    /// Zero for the exact method.
    pub std_error: f64,
}

fn strictly_inside<'a>(points: &'a [Vec<f64>], reference: &[f64]) -> Vec<&'a [f64]> {
    points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .map(Vec::as_slice)
        .collect()
}

fn hv_2d(points: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut best_y = reference[1];
    for p in points.iter() {
        if p[1] < best_y {
            volume += (reference[0] - p[0]) * (best_y - p[1]);
            best_y = p[1];
        }
    }
    volume
}

/// Slices along the last objective and recurses on the projections.
fn hv_recursive(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if points.is_empty() {
        return 0.0;
    }
    if m == 1 {
        return reference[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    }
    if m == 2 {
        return hv_2d(&mut points, reference);
    }
    points.sort_by(|a, b| a[m - 1].total_cmp(&b[m - 1]));
    let mut volume = 0.0;
    let mut front: Vec<Vec<f64>> = Vec::new();
    for i in 0..points.len() {
        let proj = points[i][..m - 1].to_vec();
        if !front
            .iter()
            .any(|q| q.iter().zip(&proj).all(|(a, b)| a <= b))
        {
            front.retain(|q| !q.iter().zip(&proj).all(|(a, b)| b <= a));
            front.push(proj);
        }
        let next = if i + 1 < points.len() {
            points[i + 1][m - 1]
        } else {
            reference[m - 1]
        };
        let height = next - points[i][m - 1];
        if height > 0.0 {
            volume += height * hv_recursive(front.clone(), &reference[..m - 1]);
        }
    }
    volume
}

/// Dominated volume of `points` bounded by `reference` (minimization).
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64], method: &HvMethod) -> HvEstimate {
    let inside = strictly_inside(points, reference);
    if inside.is_empty() {
        return HvEstimate {
            value: 0.0,
            std_error: 0.0,
        };
    }
    match method {
        HvMethod::Exact => HvEstimate {
            value: hv_recursive(inside.iter().map(|p| p.to_vec()).collect(), reference),
            std_error: 0.0,
        },
        HvMethod::MonteCarlo {
            samples,
            seed,
            lower,
        } => {
            let box_volume: f64 = reference.iter().zip(lower).map(|(r, l)| r - l).product();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let m = reference.len();
            let mut sample = vec![0.0; m];
            let mut hits = 0usize;
            for _ in 0..*samples {
                for k in 0..m {
                    sample[k] = lower[k] + rng.random::<f64>() * (reference[k] - lower[k]);
                }
                if inside
                    .iter()
                    .any(|p| p.iter().zip(&sample).all(|(a, s)| a <= s))
                {
                    hits += 1;
                }
            }
            let frac = hits as f64 / *samples as f64;
            HvEstimate {
                value: box_volume * frac,
                std_error: box_volume * (frac * (1.0 - frac) / *samples as f64).sqrt(),
            }
        }
    }
}

fn mean_min_distance<D: Fn(&[f64], &[f64]) -> f64>(
    points: &[Vec<f64>],
    refs: &[Vec<f64>],
    dist: D,
) -> f64 {
    assert!(!refs.is_empty(), "reference set must not be empty");
    if points.is_empty() {
        return f64::INFINITY;
    }
    refs.iter()
        .map(|z| {
            points
                .iter()
                .map(|a| dist(z, a))
                .fold(f64::INFINITY, f64::min)
        })
        .sum::<f64>()
        / refs.len() as f64
}

/// Mean over references of the dominance-aware distance to the nearest point.
/// `+inf` for an empty point set.
pub fn igd_plus(points: &[Vec<f64>], refs: &[Vec<f64>]) -> f64 {
    mean_min_distance(points, refs, |z, a| {
        z.iter()
            .zip(a)
            .map(|(zi, ai)| (ai - zi).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt()
    })
}

pub fn igd(points: &[Vec<f64>], refs: &[Vec<f64>]) -> f64 {
    mean_min_distance(points, refs, |z, a| {
        z.iter()
            .zip(a)
            .map(|(zi, ai)| (ai - zi).powi(2))
            .sum::<f64>()
            .sqrt()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    assert!(!values.is_empty(), "nothing to summarize");
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        log::warn!("standard deviation of a single value reported as 0");
        0.0
    };
    Summary {
        count: n,
        mean,
        std,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Linear-interpolation percentile, `q` in `[0, 100]`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 100.0) / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}
