//! The optimization loop.
//!
//! Every iteration fits one Kriging model per objective, estimates the
//! Pareto front on the surrogate means, builds reference vectors (adapted to
//! the estimated front, or a fixed lattice in baseline mode), maximizes the
//! criterion for every vector and evaluates one pick per cluster.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doe::latin_hypercube;
use crate::ea::{run_nsga3, run_single_objective_ga, EaConfig};
use crate::epbii::{
    compute_theta_ref, initial_candidates, maximize_epbii, reference_pbi, EpbiiProblem,
    EpbiiSettings, McSampleBlock, Surrogate,
};
use crate::error::{Error, Result};
use crate::kriging::{KrigingModel, KrigingSummary, LikelihoodGaConfig};
use crate::metrics::{hypervolume, igd_plus, HvMethod};
use crate::pareto::{
    epsilon_dominance_filter, estimate_nadir_utopia, nondominated_indices, sld_count,
    two_layer_sld, NadirUtopia,
};
use crate::problems::{Dtlz, Problem};
use crate::selection::{select_additional, CandidateRow, NicheState, SelectionContext};
use crate::srva::{
    adaptive_reference_vectors, sld_reference_vectors, ReferenceVectorSet, VectorSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefVectorMode {
    #[default]
    Adaptive,
    Sld,
}

/// Default `(reference layers, NSGA-III layers)` per objective count.
pub fn default_layers(n_obj: usize) -> Option<([usize; 2], [usize; 2])> {
    Some(match n_obj {
        2 => ([20, 0], [200, 0]),
        3 => ([12, 0], [30, 0]),
        4 => ([6, 0], [12, 0]),
        5 => ([4, 0], [8, 0]),
        6 => ([3, 3], [6, 5]),
        7 | 8 => ([3, 2], [5, 4]),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub n_init: usize,
    pub n_max: usize,
    pub n_add: usize,
    /// Reference-vector count; defaults to the size of `ref_layers`.
    pub n_ref: Option<usize>,
    pub mode: RefVectorMode,
    /// Lattice layers `(H1, H2)` for baseline mode and the adaptation fallback.
    pub ref_layers: Option<[usize; 2]>,
    /// Lattice layers of the fixed NSGA-III directions.
    pub nsga3_layers: Option<[usize; 2]>,
    pub nsga3_generations: usize,
    pub extreme_ga_population: usize,
    pub extreme_ga_generations: usize,
    pub moead_generations: usize,
    pub kriging: LikelihoodGaConfig,
    pub eps: f64,
    pub theta_pbi: f64,
    pub mc_samples: usize,
    pub seed: u64,
    /// Keep reference vectors and per-vector criterion data in the record.
    pub debug: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_init: 30,
            n_max: 300,
            n_add: 10,
            n_ref: None,
            mode: RefVectorMode::Adaptive,
            ref_layers: None,
            nsga3_layers: None,
            nsga3_generations: 200,
            extreme_ga_population: 50,
            extreme_ga_generations: 100,
            moead_generations: 50,
            kriging: LikelihoodGaConfig::default(),
            eps: 0.01,
            theta_pbi: 1.0,
            mc_samples: 100,
            seed: 0,
            debug: false,
        }
    }
}

/// Settings with every per-objective default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedLayers {
    pub n_ref: usize,
    pub ref_layers: [usize; 2],
    pub nsga3_layers: [usize; 2],
    pub nsga3_vectors: usize,
}

impl OptimizerConfig {
    pub fn resolve(&self, n_obj: usize) -> Result<ResolvedLayers> {
        let defaults = default_layers(n_obj);
        let missing = || {
            Error::Config(format!(
                "no default reference layers for {n_obj} objectives; set them explicitly"
            ))
        };
        let ref_layers = match self.ref_layers {
            Some(l) => l,
            None => defaults.ok_or_else(missing)?.0,
        };
        let nsga3_layers = match self.nsga3_layers {
            Some(l) => l,
            None => defaults.ok_or_else(missing)?.1,
        };
        if ref_layers[0] == 0 || nsga3_layers[0] == 0 {
            return Err(Error::Config(
                "the outer lattice layer needs at least one division".into(),
            ));
        }
        let lattice = sld_count(n_obj, ref_layers[0], ref_layers[1]);
        let n_ref = self.n_ref.unwrap_or(lattice);
        if self.mode == RefVectorMode::Sld && n_ref != lattice {
            return Err(Error::Config(format!(
                "baseline mode uses the {lattice} lattice vectors but n_ref = {n_ref}"
            )));
        }
        Ok(ResolvedLayers {
            n_ref,
            ref_layers,
            nsga3_layers,
            nsga3_vectors: sld_count(n_obj, nsga3_layers[0], nsga3_layers[1]),
        })
    }

    pub fn validate(&self, n_obj: usize, n_var: usize) -> Result<ResolvedLayers> {
        let layers = self.resolve(n_obj)?;
        if self.n_init < 2 {
            return Err(Error::Config("n_init must be at least 2".into()));
        }
        if self.n_max < self.n_init {
            return Err(Error::Config(format!(
                "n_max ({}) is below n_init ({})",
                self.n_max, self.n_init
            )));
        }
        if self.n_add == 0 {
            return Err(Error::Config("n_add must be at least 1".into()));
        }
        if self.n_add > layers.n_ref {
            return Err(Error::Config(format!(
                "n_add ({}) exceeds the number of reference vectors ({})",
                self.n_add, layers.n_ref
            )));
        }
        if layers.nsga3_vectors < 5 * layers.n_ref {
            return Err(Error::Config(format!(
                "NSGA-III needs at least five times as many fixed vectors as reference vectors: {} < 5 x {}",
                layers.nsga3_vectors, layers.n_ref
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config("eps must be positive".into()));
        }
        if !(self.theta_pbi >= 0.0) {
            return Err(Error::Config("theta_pbi must be nonnegative".into()));
        }
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be at least 1".into()));
        }
        if self.extreme_ga_population < 4 {
            return Err(Error::Config(
                "extreme_ga_population must be at least 4".into(),
            ));
        }
        self.kriging.validate()?;
        if self.n_init < n_var + 2 {
            log::warn!(
                "n_init = {} is below n_var + 2 = {}",
                self.n_init,
                n_var + 2
            );
        }
        Ok(layers)
    }
}

/// Independent stream seeds derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Lhs,
    Kriging(usize),
    Nsga3,
    ExtremeGa(usize),
    KMeans,
    MonteCarlo,
    Moead,
    Jitter,
    Fallback,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_seed(master: u64, iteration: usize, stream: Stream) -> u64 {
    let (tag, index) = match stream {
        Stream::Lhs => (1, 0),
        Stream::Kriging(k) => (2, k),
        Stream::Nsga3 => (3, 0),
        Stream::ExtremeGa(k) => (4, k),
        Stream::KMeans => (5, 0),
        Stream::MonteCarlo => (6, 0),
        Stream::Moead => (7, 0),
        Stream::Jitter => (8, 0),
        Stream::Fallback => (9, 0),
    };
    let mut h = splitmix64(master);
    for v in [iteration as u64, tag, index as u64] {
        h = splitmix64(h ^ v);
    }
    h
}

fn rng_for(master: u64, iteration: usize, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, iteration, stream))
}

/// Surrogate NDSs with the ε-filtered subset and the derived nadir/utopia.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedFront {
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    /// Indices into `f` that survive the ε-dominance filter.
    pub filtered: Vec<usize>,
    pub nadir_utopia: NadirUtopia,
}

pub struct FrontSettings<'a> {
    pub nsga3_dirs: &'a [Vec<f64>],
    pub nsga3: EaConfig,
    pub extreme: EaConfig,
    pub eps: f64,
    /// Stand-in ranges for objectives that collapse on the front.
    pub fallback_range: Option<&'a [f64]>,
}

/// NSGA-III on the surrogate means, one extreme-solution GA per objective,
/// ε-filtering and nadir/utopia estimation.
pub fn estimate_front<S: Surrogate + ?Sized>(
    surrogate: &S,
    lower: &[f64],
    upper: &[f64],
    settings: &FrontSettings,
) -> EstimatedFront {
    let m = surrogate.n_obj();
    let nsga = run_nsga3(
        |x| surrogate.predict_mean(x),
        lower,
        upper,
        settings.nsga3_dirs,
        &settings.nsga3,
    );
    let mut x = nsga.x;
    let mut f = nsga.f;
    if x.len() < m {
        log::warn!("NSGA-III returned only {} points", x.len());
    }
    let extremes: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let cfg = settings
                .extreme
                .clone()
                .with_seed(settings.extreme.seed.wrapping_add(k as u64));
            run_single_objective_ga(|xx| surrogate.predict_mean(xx)[k], lower, upper, &cfg).genes
        })
        .collect();
    for e in extremes {
        f.push(surrogate.predict_mean(&e));
        x.push(e);
    }
    let keep = nondominated_indices(&f);
    let x: Vec<Vec<f64>> = keep.iter().map(|&i| x[i].clone()).collect();
    let f: Vec<Vec<f64>> = keep.iter().map(|&i| f[i].clone()).collect();
    let filtered = epsilon_dominance_filter(&f, settings.eps);
    let nadir_utopia = estimate_nadir_utopia(
        &filtered.points(&f),
        &filtered.scale,
        settings.eps,
        settings.fallback_range,
    );
    EstimatedFront {
        x,
        f,
        filtered: filtered.indices,
        nadir_utopia,
    }
}

/// Indicator setup shared by all iterations of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Indicators {
    pub hv_reference: Vec<f64>,
    pub hv_method: HvMethod,
    pub igd_reference: Option<Vec<Vec<f64>>>,
}

pub const IGD_REFERENCE_SEED: u64 = 20_240_601;

impl Indicators {
    /// Benchmark defaults: the standard reference point, exact HV up to four
    /// objectives and a seeded analytic-front cloud for IGD+.
    pub fn for_dtlz(problem: &Dtlz) -> Result<Self> {
        let hv_reference = problem.default_hv_reference().ok_or_else(|| {
            Error::Unsupported(format!("no default HV reference for {}", problem.name()))
        })?;
        let igd_reference = match problem.default_igd_reference_count() {
            Some(count) => {
                let mut rng = ChaCha8Rng::seed_from_u64(IGD_REFERENCE_SEED);
                Some(problem.sample_true_pf(count, &mut rng)?)
            }
            None => None,
        };
        Ok(Self {
            hv_method: HvMethod::auto(&problem.ideal_point()),
            hv_reference,
            igd_reference,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDiagnostics {
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub g_ref: Vec<f64>,
    pub occupancy: Vec<usize>,
    pub best_epbii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub front_size: usize,
    pub filtered_size: usize,
    pub nadir_utopia: NadirUtopia,
    pub theta_ref: f64,
    pub d_min: f64,
    pub empty_territories: usize,
    pub shortfall: usize,
    pub srva_fallback: bool,
    pub jittered: usize,
    /// Criterion value of every pick.
    pub pick_epbii: Vec<f64>,
    pub kriging: Vec<KrigingSummary>,
    pub vectors: Option<VectorDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub n: usize,
    pub hv: f64,
    pub hv_std_error: f64,
    pub igd_plus: Option<f64>,
    /// Archive indices of the non-dominated samples.
    pub nds: Vec<usize>,
    pub source: Option<VectorSource>,
    pub diagnostics: Option<IterationDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub n_obj: usize,
    pub n_var: usize,
    pub config: OptimizerConfig,
    pub n_ref: usize,
    pub hv_reference: Vec<f64>,
    pub hv_method: HvMethod,
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    pub iterations: Vec<IterationRecord>,
    /// Wall-clock seconds per iteration; the only nondeterministic field.
    pub wall_seconds: Vec<f64>,
}

impl RunRecord {
    pub fn final_iteration(&self) -> &IterationRecord {
        self.iterations
            .last()
            .expect("a record holds at least the initial design")
    }

    pub fn final_hv(&self) -> f64 {
        self.final_iteration().hv
    }

    pub fn final_igd_plus(&self) -> Option<f64> {
        self.final_iteration().igd_plus
    }

    /// Copy with the timings cleared, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        Self {
            wall_seconds: Vec::new(),
            ..self.clone()
        }
    }

    /// Objective vectors of the final non-dominated samples.
    pub fn final_front(&self) -> Vec<Vec<f64>> {
        self.final_iteration()
            .nds
            .iter()
            .map(|&i| self.f[i].clone())
            .collect()
    }

    /// Iteration whose sample count is the first to reach `n`.
    pub fn at_samples(&self, n: usize) -> Option<&IterationRecord> {
        self.iterations.iter().find(|it| it.n >= n)
    }
}

fn evaluate_all<P: Problem + ?Sized>(
    problem: &P,
    xs: &[Vec<f64>],
    offset: usize,
) -> Result<Vec<Vec<f64>>> {
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = problem.evaluate(x)?;
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteObjective {
                    sample: offset + i,
                    values: f,
                });
            }
            Ok(f)
        })
        .collect()
}

fn measure(f: &[Vec<f64>], indicators: &Indicators) -> (Vec<usize>, f64, f64, Option<f64>) {
    let nds = nondominated_indices(f);
    let front: Vec<Vec<f64>> = nds.iter().map(|&i| f[i].clone()).collect();
    let hv = hypervolume(&front, &indicators.hv_reference, &indicators.hv_method);
    let igd = indicators
        .igd_reference
        .as_ref()
        .map(|r| igd_plus(&front, r));
    (nds, hv.value, hv.std_error, igd)
}

fn objective_ranges(f: &[Vec<f64>]) -> Vec<f64> {
    let m = f[0].len();
    (0..m)
        .map(|k| {
            let (lo, hi) = f
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[k]), hi.max(p[k]))
                });
            hi - lo
        })
        .collect()
}

/// One full run on a benchmark problem with its default indicators.
pub fn run(problem: &Dtlz, cfg: &OptimizerConfig) -> Result<RunRecord> {
    let indicators = Indicators::for_dtlz(problem)?;
    run_with(problem, cfg, &indicators)
}

/// One full run with explicit indicator settings.
pub fn run_with<P: Problem + ?Sized>(
    problem: &P,
    cfg: &OptimizerConfig,
    indicators: &Indicators,
) -> Result<RunRecord> {
    let m = problem.n_obj();
    let n_var = problem.n_var();
    let layers = cfg.validate(m, n_var)?;
    if indicators.hv_reference.len() != m {
        return Err(Error::Config(
            "HV reference point has the wrong dimension".into(),
        ));
    }
    let (lower, upper) = (problem.lower().to_vec(), problem.upper().to_vec());
    let nsga3_dirs = two_layer_sld(m, layers.nsga3_layers[0], layers.nsga3_layers[1]).vectors;

    let start = Instant::now();
    let mut rng = rng_for(cfg.seed, 0, Stream::Lhs);
    let mut x = latin_hypercube(cfg.n_init, n_var, &mut rng)?.scaled(&lower, &upper);
    let mut f = evaluate_all(problem, &x, 0)?;
    let (nds, hv, hv_se, igd) = measure(&f, indicators);
    let mut iterations = vec![IterationRecord {
        iteration: 0,
        n: x.len(),
        hv,
        hv_std_error: hv_se,
        igd_plus: igd,
        nds,
        source: None,
        diagnostics: None,
    }];
    let mut wall_seconds = vec![start.elapsed().as_secs_f64()];

    let mut iteration = 0;
    while x.len() < cfg.n_max {
        iteration += 1;
        let start = Instant::now();

        let models: Vec<KrigingModel> = (0..m)
            .into_par_iter()
            .map(|k| {
                let y: Vec<f64> = f.iter().map(|fi| fi[k]).collect();
                let kcfg = LikelihoodGaConfig {
                    seed: stream_seed(cfg.seed, iteration, Stream::Kriging(k)),
                    ..cfg.kriging.clone()
                };
                KrigingModel::fit(&x, &y, &kcfg)
            })
            .collect::<Result<_>>()?;
        let surrogate: &[KrigingModel] = &models;

        let ranges = objective_ranges(&f);
        let front = estimate_front(
            surrogate,
            &lower,
            &upper,
            &FrontSettings {
                nsga3_dirs: &nsga3_dirs,
                nsga3: EaConfig {
                    generations: cfg.nsga3_generations,
                    seed: stream_seed(cfg.seed, iteration, Stream::Nsga3),
                    ..EaConfig::default()
                },
                extreme: EaConfig {
                    population: cfg.extreme_ga_population,
                    generations: cfg.extreme_ga_generations,
                    seed: stream_seed(cfg.seed, iteration, Stream::ExtremeGa(0)),
                    ..EaConfig::default()
                },
                eps: cfg.eps,
                fallback_range: Some(&ranges),
            },
        );
        let nu = &front.nadir_utopia;
        let samples_norm = nu.normalize_all(&f);
        let front_norm = nu.normalize_all(&front.f);

        let mut kmeans_rng = rng_for(cfg.seed, iteration, Stream::KMeans);
        let sld = |rng: &mut ChaCha8Rng| {
            sld_reference_vectors(
                m,
                layers.ref_layers[0],
                layers.ref_layers[1],
                cfg.n_add,
                rng,
            )
        };
        let mut shortfall = 0;
        let mut srva_fallback = false;
        let refs: ReferenceVectorSet = match cfg.mode {
            RefVectorMode::Sld => sld(&mut kmeans_rng),
            RefVectorMode::Adaptive => {
                match adaptive_reference_vectors(
                    &front_norm,
                    &samples_norm,
                    layers.n_ref,
                    cfg.n_add,
                    &mut kmeans_rng,
                ) {
                    Some((set, selection)) => {
                        shortfall = selection.shortfall;
                        set
                    }
                    None => {
                        log::warn!(
                            "iteration {iteration}: empty estimated front, using lattice vectors"
                        );
                        srva_fallback = true;
                        sld(&mut kmeans_rng)
                    }
                }
            }
        };

        let ctx = compute_theta_ref(&refs.vectors);
        let ref_pbi = reference_pbi(&samples_norm, &refs.vectors, &ctx, cfg.theta_pbi);
        let mc = McSampleBlock::new(
            cfg.mc_samples,
            m,
            &mut rng_for(cfg.seed, iteration, Stream::MonteCarlo),
        );
        let criterion = EpbiiProblem {
            vectors: &refs.vectors,
            g_ref: &ref_pbi.g_ref,
            surrogate,
            nu,
            settings: EpbiiSettings {
                theta_ref: ctx.theta_ref,
                theta_pbi: cfg.theta_pbi,
                mc: &mc,
            },
            lower: &lower,
            upper: &upper,
        };
        let init = initial_candidates(
            &refs.vectors,
            &front.x,
            &front_norm,
            &lower,
            &upper,
            &mut rng_for(cfg.seed, iteration, Stream::Fallback),
        );
        let candidates = maximize_epbii(
            &criterion,
            init,
            &EaConfig {
                generations: cfg.moead_generations,
                seed: stream_seed(cfg.seed, iteration, Stream::Moead),
                ..EaConfig::default()
            },
        );

        let nds_norm: Vec<Vec<f64>> = nondominated_indices(&f)
            .into_iter()
            .map(|i| samples_norm[i].clone())
            .collect();
        let state = NicheState::from_points(&nds_norm, &refs.vectors, ctx.theta_ref);
        let rows: Vec<CandidateRow> = candidates
            .iter()
            .zip(&refs.labels)
            .map(|(c, &cluster)| CandidateRow {
                x: c.x.clone(),
                epbii: c.epbii,
                f_norm: nu.normalize(&surrogate.predict_mean(&c.x)),
                cluster,
            })
            .collect();
        let n_pick = cfg.n_add.min(cfg.n_max - x.len());
        let picked = select_additional(
            &rows,
            n_pick,
            state,
            &SelectionContext {
                vectors: &refs.vectors,
                ctx: &ctx,
                archive: &x,
                lower: &lower,
                upper: &upper,
            },
            &mut rng_for(cfg.seed, iteration, Stream::Jitter),
        );

        let new_f = evaluate_all(problem, &picked.points, x.len())?;
        x.extend(picked.points.iter().cloned());
        f.extend(new_f);

        let (nds, hv, hv_se, igd) = measure(&f, indicators);
        let diagnostics = IterationDiagnostics {
            front_size: front.f.len(),
            filtered_size: front.filtered.len(),
            nadir_utopia: nu.clone(),
            theta_ref: ctx.theta_ref,
            d_min: ctx.d_min,
            empty_territories: ref_pbi.fallback.iter().filter(|&&b| b).count(),
            shortfall,
            srva_fallback,
            jittered: picked.jittered,
            pick_epbii: picked.picks.iter().map(|&i| candidates[i].epbii).collect(),
            kriging: models.iter().map(KrigingModel::summary).collect(),
            vectors: cfg.debug.then(|| VectorDiagnostics {
                vectors: refs.vectors.clone(),
                labels: refs.labels.clone(),
                g_ref: ref_pbi.g_ref.clone(),
                occupancy: ref_pbi.members.iter().map(Vec::len).collect(),
                best_epbii: candidates.iter().map(|c| c.epbii).collect(),
            }),
        };
        log::info!(
            "iteration {iteration}: n = {}, hv = {hv:.6}, igd+ = {}",
            x.len(),
            igd.map_or("-".to_string(), |v| format!("{v:.6}"))
        );
        iterations.push(IterationRecord {
            iteration,
            n: x.len(),
            hv,
            hv_std_error: hv_se,
            igd_plus: igd,
            nds,
            source: Some(refs.source),
            diagnostics: Some(diagnostics),
        });
        wall_seconds.push(start.elapsed().as_secs_f64());
    }

    Ok(RunRecord {
        problem: problem.name(),
        n_obj: m,
        n_var,
        config: cfg.clone(),
        n_ref: layers.n_ref,
        hv_reference: indicators.hv_reference.clone(),
        hv_method: indicators.hv_method.clone(),
        x,
        f,
        iterations,
        wall_seconds,
    })
}
