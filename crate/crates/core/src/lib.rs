//! Simulation and estimation toolkit for network peer-effect models.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! * [`graph`] — random-graph ensembles (Erdős–Rényi, bipartite/clique
//!   unions, stochastic block models, graphon sampling) plus structural
//!   statistics such as cycle censuses and the spectral radius.
//! * [`ops`] — the row-normalized operator `G`, the resolvent
//!   `(I - rho G)^{-1}`, the reduced-form operator `H`, and exact or
//!   stochastic trace moments of operator words.
//! * [`dgp`] — data generation for the linear-in-means (LIM) and
//!   linear-in-sums (LIS) outcome equations.
//! * [`estimators`] — OLS and just-identified 2SLS for LIM, rescaled 2SLS
//!   for LIS, with conditioning diagnostics.
//! * [`identify`] — strong-identification diagnostics for LIS: block-model
//!   spectra, graphon degree/codegree checks, instrument relevance.
//! * [`oracles`] — brute-force and dense reference implementations used to
//!   validate the fast paths.
//! * [`experiment`] / [`plot`] — configuration-driven Monte Carlo runs,
//!   CSV emission, and SVG rendering.

pub mod dgp;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod identify;
pub mod ops;
pub mod oracles;
pub mod plot;
pub mod seed;

pub use dgp::{Dataset, LimParams, LisParams};
pub use error::{Error, Result};
pub use estimators::{Estimate, EstimatorKind, SolveStatus};
pub use experiment::{ExperimentConfig, ResultsTable, SummaryTable};
pub use graph::{CycleCensus, EnsembleSpec, Graph};
pub use identify::{IdentificationVerdict, SbmSpec, Witness};
pub use ops::{MomentReport, OpLetter, OperatorWord, ResolventSpec, RowNormOp};
