//! Batch selection: one new sample per reference-vector cluster.

use rand::Rng;

use crate::epbii::{territory, TerritoryContext};
use crate::pareto::nondominated_sort;

pub const NC_FLOOR: f64 = 1e-12;
pub const JITTER_FRACTION: f64 = 1e-6;

/// Correction applied to normalized reference-vector distances.
pub fn h(x: f64) -> f64 {
    if x <= 1.0 {
        x * x
    } else {
        2.0 * x - 1.0
    }
}

/// Number of non-dominated points inside each territory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicheState {
    pub n_nds: Vec<usize>,
}

impl NicheState {
    /// Counts how many of `points_norm` fall in each territory.
    pub fn from_points(points_norm: &[Vec<f64>], vectors: &[Vec<f64>], theta_ref: f64) -> Self {
        let mut state = Self {
            n_nds: vec![0; vectors.len()],
        };
        for p in points_norm {
            state.add(p, vectors, theta_ref);
        }
        state
    }

    /// Increments every territory containing `f_norm`.
    pub fn add(&mut self, f_norm: &[f64], vectors: &[Vec<f64>], theta_ref: f64) {
        for (j, lambda) in vectors.iter().enumerate() {
            if territory(f_norm, lambda, theta_ref) >= 0.0 {
                self.n_nds[j] += 1;
            }
        }
    }
}

pub fn niche_count(i: usize, state: &NicheState, ctx: &TerritoryContext) -> f64 {
    state
        .n_nds
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let ratio = if ctx.d_min > 0.0 {
                ctx.d_ij[i][j] / ctx.d_min
            } else {
                0.0
            };
            n as f64 / (h(ratio) + 1.0)
        })
        .sum()
}

pub fn fitness(epbii: f64, nc: f64, rank: usize) -> f64 {
    epbii / (nc.max(NC_FLOOR) * rank as f64)
}

/// One candidate per reference vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRow {
    pub x: Vec<f64>,
    pub epbii: f64,
    /// Surrogate-mean objectives in normalized space.
    pub f_norm: Vec<f64>,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    /// Candidate index per pick, in cluster order.
    pub picks: Vec<usize>,
    /// Design points to evaluate; differs from the candidate when jittered.
    pub points: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub ranks: Vec<usize>,
    pub jittered: usize,
    pub final_state: NicheState,
}

/// Inputs shared by one selection pass.
pub struct SelectionContext<'a> {
    pub vectors: &'a [Vec<f64>],
    pub ctx: &'a TerritoryContext,
    pub archive: &'a [Vec<f64>],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

/// Picks the best-fitness candidate of clusters `0..n_pick` in order, updating
/// the territory counts with each pick's estimated objectives.
pub fn select_additional<R: Rng + ?Sized>(
    candidates: &[CandidateRow],
    n_pick: usize,
    mut state: NicheState,
    sel: &SelectionContext,
    rng: &mut R,
) -> SelectionOutcome {
    let f: Vec<Vec<f64>> = candidates.iter().map(|c| c.f_norm.clone()).collect();
    let ranks = nondominated_sort(&f);
    let mut out = SelectionOutcome {
        picks: Vec::with_capacity(n_pick),
        points: Vec::with_capacity(n_pick),
        fitness: Vec::with_capacity(n_pick),
        ranks: ranks.clone(),
        jittered: 0,
        final_state: state.clone(),
    };
    for cluster in 0..n_pick {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if c.cluster != cluster {
                continue;
            }
            let fit = fitness(c.epbii, niche_count(i, &state, sel.ctx), ranks[i]);
            if best.is_none_or(|(_, b)| fit > b) {
                best = Some((i, fit));
            }
        }
        let (i, fit) = best.unwrap_or_else(|| panic!("cluster {cluster} has no candidate"));
        state.add(&candidates[i].f_norm, sel.vectors, sel.ctx.theta_ref);
        let mut x = candidates[i].x.clone();
        while out.points.iter().chain(sel.archive).any(|p| *p == x) {
            for (k, v) in x.iter_mut().enumerate() {
                let span = sel.upper[k] - sel.lower[k];
                let jitter = JITTER_FRACTION * span * rng.random_range(-1.0..=1.0);
                *v = (*v + jitter).clamp(sel.lower[k], sel.upper[k]);
            }
            out.jittered += 1;
        }
        out.picks.push(i);
        out.points.push(x);
        out.fitness.push(fit);
    }
    out.final_state = state;
    out
}
