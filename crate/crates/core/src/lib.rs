//! Many-objective Bayesian optimization driven by Kriging surrogates.
//!
//! Each iteration fits one Kriging model per objective, estimates the Pareto
//! front on the surrogates with NSGA-III, adapts the reference vectors to the
//! estimated front (or keeps a fixed simplex lattice in baseline mode),
//! maximizes the expected PBI improvement per reference vector with MOEA/D and
//! picks one new sample per reference-vector cluster.

pub mod doe;
pub mod ea;
pub mod epbii;
pub mod error;
pub mod kriging;
mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod pareto;
pub mod problems;
pub mod selection;
pub mod srva;

pub use error::{Error, Result};
pub use kriging::{KrigingModel, LikelihoodGaConfig};
pub use metrics::{hypervolume, igd_plus, summarize, HvMethod, Summary};
pub use optimizer::{run, OptimizerConfig, RefVectorMode, RunRecord};
pub use pareto::NadirUtopia;
pub use problems::{Dtlz, DtlzKind, Problem};
pub use srva::ReferenceVectorSet;
