//! Configuration-driven Monte Carlo experiments.
//!
//! A config names an ensemble, a degree law, a model with parameters, an
//! n grid, estimators, and a base seed. Replication `r` on grid point `k`
//! derives its seed as `derive_seed(base, &[k, r])`; graph and data draws
//! split that seed further, so runs are bit-reproducible regardless of
//! thread scheduling. Results are sorted by (n, estimator, replication)
//! before any file is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::dgp::{simulate_lim, simulate_lis, LimParams, LisParams};
use crate::error::{Error, Result};
use crate::estimators::{ols_lim, tsls_lim, tsls_lis, Estimate, EstimatorKind, SolveStatus};
use crate::graph::{
    cycle_census, gen_bipartite_union, gen_clique_union, gen_erdos_renyi, gen_graphon, gen_sbm,
    spectral_radius, Graph,
};
use crate::identify::{
    degree_codegree_check, relevance_check, sbm_identification, IdentificationVerdict,
    IdentifySource, QuadGrid, SbmSpec, Tolerances,
};
use crate::ops::{frobenius_sq, moment_report, MomentReport, OpLetter, OperatorWord, RowNormOp, TraceOptions};
use crate::seed::derive_seed;

/// Degree scaling law `d(n)`; evaluated degrees are rounded to the nearest
/// integer and floored at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeLaw {
    Fixed(f64),
    /// `d(n) = c * n^alpha`.
    Power { c: f64, alpha: f64 },
}

impl DegreeLaw {
    pub fn eval(&self, n: usize) -> f64 {
        let raw = match self {
            DegreeLaw::Fixed(d) => *d,
            DegreeLaw::Power { c, alpha } => c * (n as f64).powf(*alpha),
        };
        raw.round().max(1.0)
    }
}

/// Built-in graphon kernels available from configs.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonKind {
    Constant { level: f64 },
    /// `f(u, v) = (c0 + c1 u)(c0 + c1 v)`.
    RankOne { c0: f64, c1: f64 },
    /// `f(u, v) = u + v`.
    UvSum,
}

impl GraphonKind {
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            GraphonKind::Constant { level } => *level,
            GraphonKind::RankOne { c0, c1 } => (c0 + c1 * u) * (c0 + c1 * v),
            GraphonKind::UvSum => u + v,
        }
    }

    /// Mean density `int int f`.
    pub fn mean_density(&self) -> f64 {
        match self {
            GraphonKind::Constant { level } => *level,
            GraphonKind::RankOne { c0, c1 } => (c0 + c1 / 2.0).powi(2),
            GraphonKind::UvSum => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            GraphonKind::Constant { level } => *level >= 0.0,
            GraphonKind::RankOne { c0, c1 } => *c0 >= 0.0 && c0 + c1 >= 0.0,
            GraphonKind::UvSum => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec("graphon kernel takes negative values".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    ErdosRenyi,
    BipartiteUnion,
    CliqueUnion,
    Sbm,
    Graphon,
}

impl EnsembleKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "erdos_renyi" | "er" => Ok(EnsembleKind::ErdosRenyi),
            "bipartite_union" => Ok(EnsembleKind::BipartiteUnion),
            "clique_union" => Ok(EnsembleKind::CliqueUnion),
            "sbm" => Ok(EnsembleKind::Sbm),
            "graphon" => Ok(EnsembleKind::Graphon),
            other => Err(Error::InvalidSpec(format!("unknown ensemble kind `{other}`"))),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            EnsembleKind::ErdosRenyi => "erdos_renyi",
            EnsembleKind::BipartiteUnion => "bipartite_union",
            EnsembleKind::CliqueUnion => "clique_union",
            EnsembleKind::Sbm => "sbm",
            EnsembleKind::Graphon => "graphon",
        }
    }
}

/// Ensemble plus degree law; enough to draw a graph at any grid point.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub degree: DegreeLaw,
    pub sbm: Option<SbmSpec>,
    pub graphon: Option<GraphonKind>,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EnsembleKind::Sbm => {
                if self.sbm.is_none() {
                    return Err(Error::InvalidSpec(
                        "sbm ensemble needs `p` and `pi`".into(),
                    ));
                }
            }
            EnsembleKind::Graphon => match &self.graphon {
                None => {
                    return Err(Error::InvalidSpec(
                        "graphon ensemble needs a `graphon` kernel name".into(),
                    ))
                }
                Some(g) => g.validate()?,
            },
            _ => {}
        }
        Ok(())
    }

    pub fn degree_at(&self, n: usize) -> f64 {
        self.degree.eval(n)
    }

    /// Draws one graph of size `n` with the given seed.
    pub fn generate(&self, n: usize, seed: u64) -> Result<Graph> {
        let d = self.degree_at(n);
        match self.kind {
            EnsembleKind::ErdosRenyi => gen_erdos_renyi(n, d, seed),
            EnsembleKind::BipartiteUnion => gen_bipartite_union(n, d as usize),
            EnsembleKind::CliqueUnion => gen_clique_union(n, d as usize),
            EnsembleKind::Sbm => {
                let spec = self.sbm.as_ref().expect("validated");
                let m1 = spec.mean_density();
                let p_n = d / (n as f64 * m1);
                let k = spec.p.nrows();
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|i| (0..k).map(|j| spec.p[(i, j)]).collect())
                    .collect();
                let pi: Vec<f64> = spec.pi.iter().copied().collect();
                gen_sbm(&rows, &pi, p_n, n, seed)
            }
            EnsembleKind::Graphon => {
                let kernel = self.graphon.as_ref().expect("validated");
                let m1 = kernel.mean_density();
                let p_n = d / (n as f64 * m1);
                let (g, clipped) = gen_graphon(|u, v| kernel.eval(u, v), p_n, n, seed)?;
                if clipped > 0 {
                    return Err(Error::InvalidSpec(format!(
                        "graphon sampling clipped {clipped} probabilities; lower the degree law"
                    )));
                }
                Ok(g)
            }
        }
    }
}

/// Which structural model generates the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig {
    Lim(LimParams),
    Lis(LisParams),
}

impl ModelConfig {
    fn tag(&self) -> &'static str {
        match self {
            ModelConfig::Lim(_) => "lim",
            ModelConfig::Lis(_) => "lis",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelConfig,
    pub ensemble: EnsembleConfig,
    pub n_grid: Vec<usize>,
    pub estimators: Vec<EstimatorKind>,
    pub replications: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidSpec("n grid must be nonempty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("n grid must be strictly ascending".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSpec("replications must be >= 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidSpec("at least one estimator".into()));
        }
        for est in &self.estimators {
            let compatible = match (est, &self.model) {
                (EstimatorKind::OlsLim | EstimatorKind::TslsLim, ModelConfig::Lim(_)) => true,
                (EstimatorKind::TslsLis, ModelConfig::Lis(_)) => true,
                _ => false,
            };
            if !compatible {
                return Err(Error::InvalidSpec(format!(
                    "estimator {} does not apply to the {} model",
                    est.tag(),
                    self.model.tag()
                )));
            }
        }
        match &self.model {
            ModelConfig::Lim(p) => p.validate()?,
            ModelConfig::Lis(p) => p.validate()?,
        }
        self.ensemble.validate()
    }

    /// Parses the documented TOML config schema.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        raw.into_config()
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    ensemble: RawEnsemble,
    params: Option<RawParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: Option<String>,
    model: String,
    estimators: Vec<String>,
    replications: Option<usize>,
    seed: Option<u64>,
    n_grid: RawGrid,
    output: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: Option<usize>,
    stop: Option<usize>,
    step: Option<usize>,
    values: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    kind: String,
    degree: Option<f64>,
    degree_c: Option<f64>,
    degree_alpha: Option<f64>,
    p: Option<Vec<Vec<f64>>>,
    pi: Option<Vec<f64>>,
    graphon: Option<String>,
    level: Option<f64>,
    coeffs: Option<Vec<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: Option<f64>,
    beta: Option<f64>,
    delta: Option<f64>,
    rho: Option<f64>,
    delta0: Option<f64>,
    rho0: Option<f64>,
    mu: Option<f64>,
    sigma: Option<f64>,
    sigma_eps: Option<f64>,
}

impl RawGrid {
    fn into_grid(self) -> Result<Vec<usize>> {
        match (self.values, self.start, self.stop, self.step) {
            (Some(values), None, None, None) => Ok(values),
            (None, Some(start), Some(stop), Some(step)) => {
                if step == 0 {
                    return Err(Error::InvalidSpec("grid step must be positive".into()));
                }
                Ok((start..=stop).step_by(step).collect())
            }
            _ => Err(Error::InvalidSpec(
                "n_grid needs either `values` or `start`/`stop`/`step`".into(),
            )),
        }
    }
}

impl RawEnsemble {
    fn into_ensemble(self) -> Result<EnsembleConfig> {
        let kind = EnsembleKind::parse(&self.kind)?;
        let degree = match (self.degree, self.degree_c, self.degree_alpha) {
            (Some(d), None, None) => DegreeLaw::Fixed(d),
            (None, Some(c), Some(alpha)) => DegreeLaw::Power { c, alpha },
            _ => {
                return Err(Error::InvalidSpec(
                    "ensemble needs `degree` or `degree_c` + `degree_alpha`".into(),
                ))
            }
        };
        let sbm = match (&self.p, &self.pi) {
            (Some(p), Some(pi)) => Some(SbmSpec::from_rows(p, pi)?),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidSpec(
                    "sbm ensemble needs both `p` and `pi`".into(),
                ))
            }
        };
        let graphon = match self.graphon.as_deref() {
            None => None,
            Some("constant") => Some(GraphonKind::Constant {
                level: self.level.ok_or_else(|| {
                    Error::InvalidSpec("constant graphon needs `level`".into())
                })?,
            }),
            Some("rank_one") => {
                let coeffs = self.coeffs.as_deref().unwrap_or(&[0.5, 1.0]);
                if coeffs.len() != 2 {
                    return Err(Error::InvalidSpec("rank_one graphon needs 2 coeffs".into()));
                }
                Some(GraphonKind::RankOne {
                    c0: coeffs[0],
                    c1: coeffs[1],
                })
            }
            Some("uv_sum") => Some(GraphonKind::UvSum),
            Some(other) => {
                return Err(Error::InvalidSpec(format!("unknown graphon `{other}`")))
            }
        };
        let out = EnsembleConfig {
            kind,
            degree,
            sbm,
            graphon,
        };
        out.validate()?;
        Ok(out)
    }
}

impl RawParams {
    fn into_lim(self) -> Result<LimParams> {
        if self.delta0.is_some() || self.rho0.is_some() {
            return Err(Error::InvalidSpec(
                "lim params take `delta`/`rho`, not `delta0`/`rho0`".into(),
            ));
        }
        let d = LimParams::default();
        Ok(LimParams {
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            delta: self.delta.unwrap_or(d.delta),
            rho: self.rho.unwrap_or(d.rho),
            mu: self.mu.unwrap_or(d.mu),
            sigma: self.sigma.unwrap_or(d.sigma),
            sigma_eps: self.sigma_eps.unwrap_or(d.sigma_eps),
        })
    }

    fn into_lis(self) -> Result<LisParams> {
        if self.delta.is_some() || self.rho.is_some() {
            return Err(Error::InvalidSpec(
                "lis params take `delta0`/`rho0`, not `delta`/`rho`".into(),
            ));
        }
        let d = LisParams::default();
        Ok(LisParams {
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            delta0: self.delta0.unwrap_or(d.delta0),
            rho0: self.rho0.unwrap_or(d.rho0),
            mu: self.mu.unwrap_or(d.mu),
            sigma: self.sigma.unwrap_or(d.sigma),
            sigma_eps: self.sigma_eps.unwrap_or(d.sigma_eps),
        })
    }
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        let params = self.params.unwrap_or_default();
        let model = match self.experiment.model.as_str() {
            "lim" => ModelConfig::Lim(params.into_lim()?),
            "lis" => ModelConfig::Lis(params.into_lis()?),
            other => {
                return Err(Error::InvalidSpec(format!(
                    "model must be `lim` or `lis`, got `{other}`"
                )))
            }
        };
        let estimators = self
            .experiment
            .estimators
            .iter()
            .map(|s| EstimatorKind::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let config = ExperimentConfig {
            name: self.experiment.name.unwrap_or_else(|| "experiment".into()),
            model,
            ensemble: self.ensemble.into_ensemble()?,
            n_grid: self.experiment.n_grid.into_grid()?,
            estimators,
            replications: self.experiment.replications.unwrap_or(200),
            seed: self.experiment.seed.unwrap_or(42),
            output: self.experiment.output.map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }
}

/// One estimator result on one replication.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub n: usize,
    pub d_target: f64,
    pub mean_degree: f64,
    pub estimator: EstimatorKind,
    pub replication: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub rho: f64,
    pub delta_err: f64,
    pub rho_err: f64,
    pub cond: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Default)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

/// Summary statistics for one (n, estimator, parameter) cell.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub n: usize,
    pub estimator: EstimatorKind,
    pub param: &'static str,
    pub reps: usize,
    pub ok: usize,
    pub unstable: usize,
    pub failed: usize,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub q025: f64,
    pub q975: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

fn failure_row(
    n: usize,
    d_target: f64,
    mean_degree: f64,
    estimator: EstimatorKind,
    replication: usize,
    seed: u64,
    reason: &str,
) -> ResultRow {
    ResultRow {
        n,
        d_target,
        mean_degree,
        estimator,
        replication,
        seed,
        alpha: f64::NAN,
        beta: f64::NAN,
        delta: f64::NAN,
        rho: f64::NAN,
        delta_err: f64::NAN,
        rho_err: f64::NAN,
        cond: f64::NAN,
        status: SolveStatus::Failed(reason.into()),
    }
}

fn estimate_to_row(
    est: &Estimate,
    n: usize,
    d_target: f64,
    mean_degree: f64,
    replication: usize,
    seed: u64,
    truth: (f64, f64),
) -> ResultRow {
    ResultRow {
        n,
        d_target,
        mean_degree,
        estimator: est.estimator,
        replication,
        seed,
        alpha: est.alpha,
        beta: est.beta,
        delta: est.delta,
        rho: est.rho,
        delta_err: est.delta - truth.0,
        rho_err: est.rho - truth.1,
        cond: est.cond,
        status: est.status.clone(),
    }
}

/// Runs the full grid x replication sweep in parallel with derived seeds.
///
/// Estimator and simulation failures become failure rows; only structural
/// problems (invalid config, graph generation bugs) abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsTable> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.n_grid.len())
        .flat_map(|k| (0..config.replications).map(move |r| (k, r)))
        .collect();
    let per_job: Result<Vec<Vec<ResultRow>>> = jobs
        .par_iter()
        .map(|&(k, r)| run_replication(config, k, r))
        .collect();
    let mut rows: Vec<ResultRow> = per_job?.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.n, a.estimator, a.replication).cmp(&(b.n, b.estimator, b.replication))
    });
    Ok(ResultsTable { rows })
}

fn run_replication(config: &ExperimentConfig, k: usize, r: usize) -> Result<Vec<ResultRow>> {
    let n = config.n_grid[k];
    let d_target = config.ensemble.degree_at(n);
    let rep_seed = derive_seed(config.seed, &[k as u64, r as u64]);
    let graph_seed = derive_seed(rep_seed, &[0]);
    let data_seed = derive_seed(rep_seed, &[1]);
    let graph = config.ensemble.generate(n, graph_seed)?;
    let mean_degree = graph.mean_degree();
    let mut rows = Vec::with_capacity(config.estimators.len());
    match &config.model {
        ModelConfig::Lim(params) => {
            let op = RowNormOp::new(&graph);
            let data = match simulate_lim(&op, params, data_seed) {
                Ok(d) => d,
                Err(e) => {
                    for &est in &config.estimators {
                        rows.push(failure_row(
                            n,
                            d_target,
                            mean_degree,
                            est,
                            r,
                            rep_seed,
                            &format!("dgp: {e}"),
                        ));
                    }
                    return Ok(rows);
                }
            };
            for &est in &config.estimators {
                let result = match est {
                    EstimatorKind::OlsLim => ols_lim(&op, &data),
                    EstimatorKind::TslsLim => tsls_lim(&op, &data),
                    EstimatorKind::TslsLis => unreachable!("validated"),
                };
                match result {
                    Ok(e) => rows.push(estimate_to_row(
                        &e,
                        n,
                        d_target,
                        mean_degree,
                        r,
                        rep_seed,
                        (params.delta, params.rho),
                    )),
                    Err(e) => rows.push(failure_row(
                        n,
                        d_target,
                        mean_degree,
                        est,
                        r,
                        rep_seed,
                        &e.to_string(),
                    )),
                }
            }
        }
        ModelConfig::Lis(params) => {
            let data = match simulate_lis(&graph, params, data_seed) {
                Ok(d) => d,
                Err(e) => {
                    for &est in &config.estimators {
                        rows.push(failure_row(
                            n,
                            d_target,
                            mean_degree,
                            est,
                            r,
                            rep_seed,
                            &format!("dgp: {e}"),
                        ));
                    }
                    return Ok(rows);
                }
            };
            let truth = (params.delta0 / mean_degree, params.rho0 / mean_degree);
            for &est in &config.estimators {
                match tsls_lis(&graph, &data) {
                    Ok(e) => rows.push(estimate_to_row(
                        &e,
                        n,
                        d_target,
                        mean_degree,
                        r,
                        rep_seed,
                        truth,
                    )),
                    Err(e) => rows.push(failure_row(
                        n,
                        d_target,
                        mean_degree,
                        est,
                        r,
                        rep_seed,
                        &e.to_string(),
                    )),
                }
            }
        }
    }
    Ok(rows)
}

/// Empirical percentile with linear interpolation on the sorted sample.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

impl ResultsTable {
    /// Per-(n, estimator, parameter) means, SDs, MC standard errors, and
    /// 2.5/97.5 percentile bands. Statistics run over finite errors (ok
    /// and unstable rows); failed rows are counted separately.
    pub fn summarize(&self) -> SummaryTable {
        let mut keys: Vec<(usize, EstimatorKind)> = self
            .rows
            .iter()
            .map(|r| (r.n, r.estimator))
            .collect();
        keys.sort();
        keys.dedup();
        let mut out = Vec::new();
        for (n, est) in keys {
            let cell: Vec<&ResultRow> = self
                .rows
                .iter()
                .filter(|r| r.n == n && r.estimator == est)
                .collect();
            let ok = cell.iter().filter(|r| r.status.is_ok()).count();
            let failed = cell.iter().filter(|r| r.status.is_failure()).count();
            let unstable = cell.len() - ok - failed;
            for (param, select) in [
                ("delta", (|r: &ResultRow| r.delta_err) as fn(&ResultRow) -> f64),
                ("rho", |r: &ResultRow| r.rho_err),
            ] {
                let mut vals: Vec<f64> = cell
                    .iter()
                    .map(|r| select(r))
                    .filter(|v| v.is_finite())
                    .collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let m = vals.len();
                let (mean, sd, se) = if m == 0 {
                    (f64::NAN, f64::NAN, f64::NAN)
                } else {
                    let mean = vals.iter().sum::<f64>() / m as f64;
                    let sd = if m > 1 {
                        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                            / (m as f64 - 1.0))
                            .sqrt()
                    } else {
                        0.0
                    };
                    (mean, sd, sd / (m as f64).sqrt())
                };
                out.push(SummaryRow {
                    n,
                    estimator: est,
                    param,
                    reps: cell.len(),
                    ok,
                    unstable,
                    failed,
                    mean,
                    sd,
                    se,
                    q025: percentile(&vals, 0.025),
                    q975: percentile(&vals, 0.975),
                });
            }
        }
        SummaryTable { rows: out }
    }

    pub const RESULTS_HEADER: &'static str =
        "n,d,estimator,replication,delta_err,rho_err,cond,status";

    /// Per-replication CSV in the documented schema.
    pub fn results_csv(&self) -> String {
        let mut s = String::from(Self::RESULTS_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.n, r.d_target, r.estimator, r.replication, r.delta_err, r.rho_err, r.cond, r.status
            );
        }
        s
    }

    /// Full estimate-level CSV (one row per estimate, level schema).
    pub fn estimates_csv(&self) -> String {
        let mut s = String::from(Estimate::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.estimator, r.n, r.d_target, r.seed, r.alpha, r.beta, r.delta, r.rho, r.cond, r.status
            );
        }
        s
    }
}

impl SummaryTable {
    pub const SUMMARY_HEADER: &'static str =
        "n,estimator,param,reps,ok,unstable,failed,mean_err,sd,se,q025,q975";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::SUMMARY_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.estimator,
                r.param,
                r.reps,
                r.ok,
                r.unstable,
                r.failed,
                r.mean,
                r.sd,
                r.se,
                r.q025,
                r.q975
            );
        }
        s
    }

    pub fn get(&self, n: usize, est: EstimatorKind, param: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.estimator == est && r.param == param)
    }
}

/// Outputs written by a figure reproduction.
#[derive(Debug, Clone)]
pub struct FigureOutputs {
    pub results_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub svgs: Vec<PathBuf>,
}

/// Built-in experiment presets for the six benchmark figures.
///
/// Figures 1-3 use Erdős–Rényi graphs with the degree-law constant
/// calibrated so that d = 10 at n = 100; figures 4-6 use block unions with
/// d = n^(1/4) directly. Figure 3 and 4 set beta = 0. Figures 5 and 6 are
/// the OLS-only and 2SLS-only clique-union panels.
pub fn figure_preset(fig: u8, reps: Option<usize>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let reps = reps.unwrap_or(200);
    let seed = seed.unwrap_or(42);
    let grid: Vec<usize> = (100..=2000).step_by(100).collect();
    let er_estimators = vec![EstimatorKind::OlsLim, EstimatorKind::TslsLim];
    let (name, degree, kind, params, estimators): (
        &str,
        DegreeLaw,
        EnsembleKind,
        LimParams,
        Vec<EstimatorKind>,
    ) = match fig {
        1 => (
            "figure1",
            DegreeLaw::Power { c: 1.0, alpha: 0.5 },
            EnsembleKind::ErdosRenyi,
            LimParams::default(),
            er_estimators,
        ),
        2 => (
            "figure2",
            DegreeLaw::Power {
                c: 10.0 / 100f64.powf(0.25),
                alpha: 0.25,
            },
            EnsembleKind::ErdosRenyi,
            LimParams::default(),
            er_estimators,
        ),
        3 => (
            "figure3",
            DegreeLaw::Power {
                c: 10.0 / 100f64.powf(0.25),
                alpha: 0.25,
            },
            EnsembleKind::ErdosRenyi,
            LimParams {
                beta: 0.0,
                ..Default::default()
            },
            er_estimators,
        ),
        4 => (
            "figure4",
            DegreeLaw::Power { c: 1.0, alpha: 0.25 },
            EnsembleKind::BipartiteUnion,
            LimParams {
                beta: 0.0,
                ..Default::default()
            },
            er_estimators,
        ),
        5 => (
            "figure5",
            DegreeLaw::Power { c: 1.0, alpha: 0.25 },
            EnsembleKind::CliqueUnion,
            LimParams::default(),
            vec![EstimatorKind::OlsLim],
        ),
        6 => (
            "figure6",
            DegreeLaw::Power { c: 1.0, alpha: 0.25 },
            EnsembleKind::CliqueUnion,
            LimParams::default(),
            vec![EstimatorKind::TslsLim],
        ),
        other => {
            return Err(Error::InvalidSpec(format!(
                "figure must be between 1 and 6, got {other}"
            )))
        }
    };
    Ok(ExperimentConfig {
        name: name.into(),
        model: ModelConfig::Lim(params),
        ensemble: EnsembleConfig {
            kind,
            degree,
            sbm: None,
            graphon: None,
        },
        n_grid: grid,
        estimators,
        replications: reps,
        seed,
        output: None,
    })
}

/// Runs a config and writes `results.csv`, `estimates.csv`,
/// `summary.csv`, and the per-parameter SVG plots into `out_dir`.
pub fn run_to_files(config: &ExperimentConfig, out_dir: &Path) -> Result<FigureOutputs> {
    std::fs::create_dir_all(out_dir)?;
    let table = run_experiment(config)?;
    let summary = table.summarize();
    let results_csv = out_dir.join("results.csv");
    let estimates_csv = out_dir.join("estimates.csv");
    let summary_csv = out_dir.join("summary.csv");
    std::fs::write(&results_csv, table.results_csv())?;
    std::fs::write(&estimates_csv, table.estimates_csv())?;
    std::fs::write(&summary_csv, summary.to_csv())?;
    let svgs = crate::plot::plot_summary_file(&summary_csv, out_dir)?;
    Ok(FigureOutputs {
        results_csv,
        summary_csv,
        svgs,
    })
}

/// Reproduces one of the benchmark figures end to end.
pub fn reproduce_figure(
    fig: u8,
    out_dir: &Path,
    reps: Option<usize>,
    seed: Option<u64>,
) -> Result<FigureOutputs> {
    let config = figure_preset(fig, reps, seed)?;
    run_to_files(&config, out_dir)
}

/// Qualitative flag levels for the diagnostic report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagLevel {
    Ok,
    Borderline,
    Violated,
}

impl std::fmt::Display for FlagLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlagLevel::Ok => "ok",
            FlagLevel::Borderline => "borderline",
            FlagLevel::Violated => "violated",
        })
    }
}

/// Structural diagnostics of one graph, with qualitative flags for the
/// regularity conditions the limit theory leans on.
#[derive(Debug, Clone)]
pub struct NetworkDiagnostics {
    pub n: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub fro_g_sq: f64,
    pub fro_g2_sq: f64,
    pub eta: f64,
    pub c3: u64,
    pub c4: u64,
    pub clustering: f64,
    /// `c3 * mean_degree / c4`; small values keep the instrument usable.
    pub triangle_ratio: f64,
    pub triangle_flag: FlagLevel,
    pub degree_ratio: f64,
    pub degree_flag: FlagLevel,
    pub max_col_sum_g: f64,
    pub col_sum_flag: FlagLevel,
    pub lambda1: f64,
    /// Upper bound on |rho| for the aggregate model, `1 / lambda1`.
    pub rho_bound: f64,
    pub moments: Option<MomentReport>,
}

/// Computes degree statistics, norm and cycle diagnostics, the spectral
/// radius, and (when model parameters are supplied) the full moment
/// report.
pub fn diagnose_graph(
    g: &Graph,
    params: Option<&LimParams>,
    opts: &TraceOptions,
) -> Result<NetworkDiagnostics> {
    let op = RowNormOp::new(g);
    let fro_g_sq = op.frobenius_sq_closed_form();
    let ctx = crate::ops::WordContext::new(&op, 0.0);
    let g2_word = OperatorWord::new(vec![OpLetter::G, OpLetter::G])?;
    let fro_g2_sq = frobenius_sq(&ctx, &g2_word, opts)?.cross;
    let census = cycle_census(g);
    let mean_degree = g.mean_degree();
    let triangle_ratio = if census.c4 == 0 {
        0.0
    } else {
        census.c3 as f64 * mean_degree / census.c4 as f64
    };
    let triangle_flag = if triangle_ratio < 0.1 {
        FlagLevel::Ok
    } else if triangle_ratio < 0.5 {
        FlagLevel::Borderline
    } else {
        FlagLevel::Violated
    };
    let (dmin, dmax) = (g.min_degree(), g.max_degree());
    let degree_ratio = if dmin == 0 {
        f64::INFINITY
    } else {
        dmax as f64 / dmin as f64
    };
    let degree_flag = if dmin == 0 {
        FlagLevel::Violated
    } else if degree_ratio <= 4.0 {
        FlagLevel::Ok
    } else {
        FlagLevel::Borderline
    };
    // Column sums of G: sum_i A_ij / d_i.
    let mut col_sums = vec![0.0f64; g.n()];
    for i in 0..g.n() {
        let w = op.inv_degrees()[i];
        for &j in g.neighbors(i) {
            col_sums[j as usize] += w;
        }
    }
    let max_col_sum_g = col_sums.iter().fold(0.0f64, |a, &b| a.max(b));
    let col_sum_flag = if max_col_sum_g <= 4.0 {
        FlagLevel::Ok
    } else if max_col_sum_g <= 16.0 {
        FlagLevel::Borderline
    } else {
        FlagLevel::Violated
    };
    let lambda1 = spectral_radius(g, 1e-6)?;
    let moments = match params {
        Some(p) => Some(moment_report(&op, p, opts)?),
        None => None,
    };
    Ok(NetworkDiagnostics {
        n: g.n(),
        edges: g.num_edges(),
        min_degree: dmin,
        mean_degree,
        max_degree: dmax,
        fro_g_sq,
        fro_g2_sq,
        eta: (fro_g2_sq / fro_g_sq).sqrt(),
        c3: census.c3,
        c4: census.c4,
        clustering: census.clustering(),
        triangle_ratio,
        triangle_flag,
        degree_ratio,
        degree_flag,
        max_col_sum_g,
        col_sum_flag,
        lambda1,
        rho_bound: if lambda1 > 0.0 { 1.0 / lambda1 } else { f64::INFINITY },
        moments,
    })
}

impl std::fmt::Display for NetworkDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n = {}, edges = {}", self.n, self.edges)?;
        writeln!(
            f,
            "degrees: min {} / mean {:.3} / max {}  (max/min = {:.3}, near-regularity {})",
            self.min_degree, self.mean_degree, self.max_degree, self.degree_ratio, self.degree_flag
        )?;
        writeln!(
            f,
            "norms: |G|_F^2 = {:.6}, |G^2|_F^2 = {:.6}, eta = {:.6}",
            self.fro_g_sq, self.fro_g2_sq, self.eta
        )?;
        writeln!(
            f,
            "cycles: c3 = {}, c4 = {}, clustering = {:.6}",
            self.c3, self.c4, self.clustering
        )?;
        writeln!(
            f,
            "triangle ratio c3*d/c4 = {:.4}  (instrument validity {})",
            self.triangle_ratio, self.triangle_flag
        )?;
        writeln!(
            f,
            "max column sum of G = {:.4}  (bounded-influence {})",
            self.max_col_sum_g, self.col_sum_flag
        )?;
        writeln!(
            f,
            "lambda_1(A) = {:.6}, aggregate-model validity bound |rho| < {:.6}",
            self.lambda1, self.rho_bound
        )?;
        if let Some(m) = &self.moments {
            writeln!(f, "moment report:")?;
            for line in m.to_kv_text().lines() {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

/// Composite identification report produced by the `identify` command.
#[derive(Debug, Clone)]
pub struct IdentifyReport {
    pub spectral: IdentificationVerdict,
    pub degree_codegree: IdentificationVerdict,
    pub relevance: Option<IdentificationVerdict>,
}

impl IdentifyReport {
    pub fn render(&self) -> String {
        let mut s = String::from("== spectral condition ==\n");
        s.push_str(&self.spectral.report());
        s.push_str("== degree/codegree condition ==\n");
        s.push_str(&self.degree_codegree.report());
        if let Some(r) = &self.relevance {
            s.push_str("== instrument relevance ==\n");
            s.push_str(&r.report());
        }
        s
    }

    /// Machine rows (`check,identified,witness,min_gram_eig,kappa`).
    pub fn csv(&self) -> String {
        let mut s = String::from("check,identified,witness,min_gram_eig,kappa\n");
        s.push_str(&format!("spectral,{}\n", self.spectral.csv_row()));
        s.push_str(&format!("degree_codegree,{}\n", self.degree_codegree.csv_row()));
        if let Some(r) = &self.relevance {
            s.push_str(&format!("relevance,{}\n", r.csv_row()));
        }
        s
    }
}

/// Config for the identification checks.
#[derive(Debug, Clone)]
pub struct IdentifyConfig {
    pub sbm: Option<SbmSpec>,
    pub graphon: Option<GraphonKind>,
    pub params: Option<LisParams>,
    pub quad: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentifyFile {
    identify: RawIdentify,
    params: Option<RawParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentify {
    kind: String,
    p: Option<Vec<Vec<f64>>>,
    pi: Option<Vec<f64>>,
    graphon: Option<String>,
    level: Option<f64>,
    coeffs: Option<Vec<f64>>,
    quad: Option<usize>,
}

impl IdentifyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawIdentifyFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let quad = raw.identify.quad.unwrap_or(300);
        let params = raw.params.map(|p| p.into_lis()).transpose()?;
        match raw.identify.kind.as_str() {
            "sbm" => {
                let (p, pi) = match (raw.identify.p, raw.identify.pi) {
                    (Some(p), Some(pi)) => (p, pi),
                    _ => {
                        return Err(Error::InvalidSpec(
                            "identify kind `sbm` needs `p` and `pi`".into(),
                        ))
                    }
                };
                Ok(IdentifyConfig {
                    sbm: Some(SbmSpec::from_rows(&p, &pi)?),
                    graphon: None,
                    params,
                    quad,
                })
            }
            "graphon" => {
                let ens = RawEnsemble {
                    kind: "graphon".into(),
                    degree: Some(1.0),
                    degree_c: None,
                    degree_alpha: None,
                    p: None,
                    pi: None,
                    graphon: raw.identify.graphon,
                    level: raw.identify.level,
                    coeffs: raw.identify.coeffs,
                };
                let cfg = ens.into_ensemble()?;
                Ok(IdentifyConfig {
                    sbm: None,
                    graphon: cfg.graphon,
                    params,
                    quad,
                })
            }
            other => Err(Error::InvalidSpec(format!(
                "identify kind must be `sbm` or `graphon`, got `{other}`"
            ))),
        }
    }

    pub fn run(&self, tols: &Tolerances) -> Result<IdentifyReport> {
        match (&self.sbm, &self.graphon) {
            (Some(spec), None) => {
                let spectral = sbm_identification(spec, tols)?;
                let grid = QuadGrid::blocked(&spec.breakpoints(), self.quad);
                let dc = degree_codegree_check(&|u, v| spec.kernel(u, v), &grid, tols);
                let relevance = self
                    .params
                    .as_ref()
                    .map(|p| relevance_check(&IdentifySource::Sbm(spec), p, tols))
                    .transpose()?;
                Ok(IdentifyReport {
                    spectral,
                    degree_codegree: dc,
                    relevance,
                })
            }
            (None, Some(kernel)) => {
                let grid = QuadGrid::uniform(self.quad);
                let f = |u: f64, v: f64| kernel.eval(u, v);
                let (eigs, ovs) = crate::identify::graphon_spectrum(&f, &grid, 8);
                let spectral = crate::identify::spectral_verdict(eigs, ovs, tols);
                let dc = degree_codegree_check(&f, &grid, tols);
                let relevance = self
                    .params
                    .as_ref()
                    .map(|p| {
                        relevance_check(
                            &IdentifySource::Graphon {
                                f: &f,
                                grid: &grid,
                                keep: 8,
                            },
                            p,
                            tols,
                        )
                    })
                    .transpose()?;
                Ok(IdentifyReport {
                    spectral,
                    degree_codegree: dc,
                    relevance,
                })
            }
            _ => Err(Error::InvalidSpec("identify config needs exactly one source".into())),
        }
    }
}
