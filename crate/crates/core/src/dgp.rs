//! Data generation for the linear-in-means and linear-in-sums outcome
//! equations.
//!
//! Both simulators draw Gaussian covariates and errors, then solve the
//! structural equation exactly (to solver tolerance) for the outcome
//! vector. Structural errors are retained on the dataset for oracle tests
//! only; estimators never read them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{spectral_radius, Graph};
use crate::ops::{solve_resolvent, ResolventSpec, RowNormOp};

/// Linear-in-means parameters: outcome depends on neighborhood averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub rho: f64,
    /// Covariate mean and standard deviation.
    pub mu: f64,
    pub sigma: f64,
    pub sigma_eps: f64,
}

impl Default for LimParams {
    /// The benchmark configuration used throughout the experiments:
    /// alpha 1, beta 1.5, delta 0.6, rho 0.3, X ~ N(2, 1), sd(eps) 0.1.
    fn default() -> Self {
        LimParams {
            alpha: 1.0,
            beta: 1.5,
            delta: 0.6,
            rho: 0.3,
            mu: 2.0,
            sigma: 1.0,
            sigma_eps: 0.1,
        }
    }
}

impl LimParams {
    pub fn validate(&self) -> Result<()> {
        if self.rho.abs() >= 1.0 {
            return Err(Error::SpectralValidity(format!(
                "|rho| = {} must be < 1",
                self.rho.abs()
            )));
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidSpec("sigma must be positive".into()));
        }
        if self.sigma_eps < 0.0 {
            return Err(Error::InvalidSpec("sigma_eps must be non-negative".into()));
        }
        Ok(())
    }
}

/// Linear-in-sums parameters with degree-rescaled network effects:
/// the simulated coefficients are `delta0 / dbar` and `rho0 / dbar` where
/// `dbar` is the mean degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LisParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta0: f64,
    pub rho0: f64,
    pub mu: f64,
    pub sigma: f64,
    pub sigma_eps: f64,
}

impl Default for LisParams {
    fn default() -> Self {
        LisParams {
            alpha: 1.0,
            beta: 1.5,
            delta0: 0.6,
            rho0: 0.3,
            mu: 2.0,
            sigma: 1.0,
            sigma_eps: 0.1,
        }
    }
}

impl LisParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 {
            return Err(Error::InvalidSpec("sigma must be positive".into()));
        }
        if self.sigma_eps < 0.0 {
            return Err(Error::InvalidSpec("sigma_eps must be non-negative".into()));
        }
        Ok(())
    }
}

/// Covariates and outcomes for one network.
///
/// `eps` holds the structural errors for oracle tests; estimator-facing
/// code must only use `x` and `y`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub eps: Vec<f64>,
    pub seed: u64,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// CSV export with columns `node_id,x,y`; `eps` is appended only in
    /// debug exports.
    pub fn to_csv(&self, debug: bool) -> String {
        let mut s = String::from(if debug { "node_id,x,y,eps\n" } else { "node_id,x,y\n" });
        for i in 0..self.n() {
            if debug {
                s.push_str(&format!("{i},{},{},{}\n", self.x[i], self.y[i], self.eps[i]));
            } else {
                s.push_str(&format!("{i},{},{}\n", self.x[i], self.y[i]));
            }
        }
        s
    }
}

fn draw_gaussian(rng: &mut ChaCha8Rng, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    if sd == 0.0 {
        return vec![mean; n];
    }
    let dist = Normal::new(mean, sd).expect("valid normal");
    (0..n).map(|_| dist.sample(rng)).collect()
}

/// Simulates the linear-in-means equation
/// `Y = alpha 1 + X beta + G X delta + rho G Y + eps` by solving
/// `(I - rho G) Y = rhs` to a relative residual below 1e-11.
pub fn simulate_lim(op: &RowNormOp, params: &LimParams, seed: u64) -> Result<Dataset> {
    params.validate()?;
    let n = op.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = draw_gaussian(&mut rng, n, params.mu, params.sigma);
    let eps = draw_gaussian(&mut rng, n, 0.0, params.sigma_eps);
    let gx = op.apply_vec(&x);
    let rhs: Vec<f64> = (0..n)
        .map(|i| params.alpha + params.beta * x[i] + params.delta * gx[i] + eps[i])
        .collect();
    let spec = ResolventSpec::new(params.rho).with_tol(1e-11);
    let y = solve_resolvent(op, &spec, &rhs, false)?;
    Ok(Dataset { x, y, eps, seed })
}

/// Solves `(I - rho_n A) y = b` by fixed-point iteration; the caller must
/// have verified `|rho_n| * lambda_1(A) < 1`.
fn solve_adjacency_resolvent(
    graph: &Graph,
    rho_n: f64,
    contraction: f64,
    b: &[f64],
) -> Result<Vec<f64>> {
    let n = graph.n();
    if rho_n == 0.0 {
        return Ok(b.to_vec());
    }
    let tol: f64 = 1e-11;
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let budget = {
        let per_digit = (1.0 / tol).ln() / (1.0 / contraction).ln();
        (10.0 * per_digit.ceil()).max(20.0) as usize
    };
    let mut x = b.to_vec();
    let mut ax = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..budget {
        graph.matvec(&x, &mut ax);
        residual = (0..n)
            .map(|i| (b[i] - (x[i] - rho_n * ax[i])).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            x[i] = b[i] + rho_n * ax[i];
        }
    }
    Err(Error::NonConvergence {
        what: "adjacency resolvent solve".into(),
        iterations: budget,
        residual: residual / b_norm,
    })
}

/// Simulates the linear-in-sums equation
/// `Y = alpha 1 + X beta + A X delta_n + rho_n A Y + eps` with
/// `delta_n = delta0 / dbar`, `rho_n = rho0 / dbar`.
///
/// Fails with a spectral-validity error (carrying the measured top
/// eigenvalue) unless `|rho_n| * lambda_1(A) <= 1 - 1e-6`.
pub fn simulate_lis(graph: &Graph, params: &LisParams, seed: u64) -> Result<Dataset> {
    params.validate()?;
    let n = graph.n();
    let dbar = graph.mean_degree();
    if dbar <= 0.0 {
        return Err(Error::InvalidSpec(
            "linear-in-sums needs a graph with edges".into(),
        ));
    }
    let rho_n = params.rho0 / dbar;
    let delta_n = params.delta0 / dbar;
    let lambda1 = spectral_radius(graph, 1e-8)?;
    let contraction = rho_n.abs() * lambda1;
    if contraction > 1.0 - 1e-6 {
        return Err(Error::SpectralValidity(format!(
            "|rho0/dbar| * lambda_1(A) = {contraction:.6} with lambda_1 = {lambda1:.4}; must stay below 1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = draw_gaussian(&mut rng, n, params.mu, params.sigma);
    let eps = draw_gaussian(&mut rng, n, 0.0, params.sigma_eps);
    let mut ax = vec![0.0; n];
    graph.matvec(&x, &mut ax);
    let rhs: Vec<f64> = (0..n)
        .map(|i| params.alpha + params.beta * x[i] + delta_n * ax[i] + eps[i])
        .collect();
    let y = solve_adjacency_resolvent(graph, rho_n, contraction, &rhs)?;
    Ok(Dataset { x, y, eps, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_bipartite_union, gen_erdos_renyi, gen_sbm};
    use crate::ops::RowNormOp;
    use approx::assert_relative_eq;

    #[test]
    fn pure_intercept_model() {
        let g = gen_erdos_renyi(400, 8.0, 5).unwrap();
        let op = RowNormOp::new(&g);
        let params = LimParams {
            beta: 0.0,
            delta: 0.0,
            rho: 0.0,
            sigma_eps: 0.5,
            ..Default::default()
        };
        let data = simulate_lim(&op, &params, 11).unwrap();
        let mean_y: f64 = data.y.iter().sum::<f64>() / 400.0;
        // Y = alpha + eps: the sample mean sits within 4 sd / sqrt(n).
        assert!((mean_y - params.alpha).abs() < 4.0 * 0.5 / 20.0);
    }

    #[test]
    fn degenerate_covariates_on_regular_graph() {
        // X == mu exactly; on a d-regular graph Y is a constant level
        // (alpha + mu beta + mu delta) / (1 - rho) plus the error pass.
        let g = gen_bipartite_union(12, 3).unwrap();
        let op = RowNormOp::new(&g);
        let params = LimParams {
            sigma: f64::MIN_POSITIVE,
            sigma_eps: 0.0,
            ..Default::default()
        };
        // sigma must be positive; use the smallest positive double and
        // then overwrite X with the exact mean.
        let mut data = simulate_lim(&op, &params, 3).unwrap();
        data.x = vec![params.mu; 12];
        let gx = op.apply_vec(&data.x);
        let rhs: Vec<f64> = (0..12)
            .map(|i| params.alpha + params.beta * data.x[i] + params.delta * gx[i])
            .collect();
        let y = solve_resolvent(&op, &ResolventSpec::new(params.rho), &rhs, false).unwrap();
        let level = (params.alpha + params.mu * params.beta + params.mu * params.delta)
            / (1.0 - params.rho);
        for v in y {
            assert_relative_eq!(v, level, max_relative = 1e-9);
        }
    }

    #[test]
    fn structural_equation_reproduces_errors() {
        let g = gen_erdos_renyi(300, 9.0, 8).unwrap();
        let op = RowNormOp::new(&g);
        let params = LimParams::default();
        let data = simulate_lim(&op, &params, 21).unwrap();
        let gx = op.apply_vec(&data.x);
        let gy = op.apply_vec(&data.y);
        for i in 0..300 {
            let implied =
                data.y[i] - params.alpha - params.beta * data.x[i] - params.delta * gx[i]
                    - params.rho * gy[i];
            assert!(
                (implied - data.eps[i]).abs() < 1e-8,
                "residual {} at {i}",
                implied - data.eps[i]
            );
        }
    }

    #[test]
    fn exogeneity_oracle() {
        // Across replications the sample correlation between eps and each
        // of X, GX stays within 4 MC standard errors of zero.
        let g = gen_erdos_renyi(200, 8.0, 17).unwrap();
        let op = RowNormOp::new(&g);
        let params = LimParams::default();
        let reps = 500;
        let mut corr_x = Vec::with_capacity(reps);
        let mut corr_gx = Vec::with_capacity(reps);
        for r in 0..reps {
            let data = simulate_lim(&op, &params, 1000 + r as u64).unwrap();
            let gx = op.apply_vec(&data.x);
            corr_x.push(sample_corr(&data.eps, &data.x));
            corr_gx.push(sample_corr(&data.eps, &gx));
        }
        for series in [corr_x, corr_gx] {
            let mean = series.iter().sum::<f64>() / reps as f64;
            let sd = (series.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (reps as f64 - 1.0))
                .sqrt();
            let se = sd / (reps as f64).sqrt();
            assert!(mean.abs() < 4.0 * se, "mean corr {mean}, se {se}");
        }
    }

    #[test]
    fn quadratic_form_oracle() {
        // E[V' G' G V] = sigma^2 Tr(G' G) with V = X - mu.
        let g = gen_erdos_renyi(150, 6.0, 29).unwrap();
        let op = RowNormOp::new(&g);
        let params = LimParams::default();
        let tr = op.frobenius_sq_closed_form();
        let reps = 600;
        let mut vals = Vec::with_capacity(reps);
        for r in 0..reps {
            let data = simulate_lim(&op, &params, 5000 + r as u64).unwrap();
            let v: Vec<f64> = data.x.iter().map(|&x| x - params.mu).collect();
            let gv = op.apply_vec(&v);
            vals.push(gv.iter().map(|x| x * x).sum::<f64>());
        }
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0))
            .sqrt();
        let se = sd / (reps as f64).sqrt();
        let expected = params.sigma * params.sigma * tr;
        assert!(
            (mean - expected).abs() < 4.0 * se,
            "mean {mean}, expected {expected}, se {se}"
        );
    }

    #[test]
    fn lis_zero_rho_is_explicit() {
        let g = gen_erdos_renyi(100, 8.0, 31).unwrap();
        let params = LisParams {
            rho0: 0.0,
            ..Default::default()
        };
        let data = simulate_lis(&g, &params, 9).unwrap();
        let dbar = g.mean_degree();
        let mut ax = vec![0.0; 100];
        g.matvec(&data.x, &mut ax);
        for i in 0..100 {
            let expected = params.alpha
                + params.beta * data.x[i]
                + params.delta0 / dbar * ax[i]
                + data.eps[i];
            assert_relative_eq!(data.y[i], expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn lis_structural_consistency() {
        let p = vec![
            vec![0.9, 0.5, 0.2],
            vec![0.5, 0.7, 0.35],
            vec![0.2, 0.35, 0.55],
        ];
        let pi = vec![1.0 / 3.0; 3];
        let g = gen_sbm(&p, &pi, 0.05, 400, 13).unwrap();
        let params = LisParams::default();
        let data = simulate_lis(&g, &params, 77).unwrap();
        let dbar = g.mean_degree();
        let mut ax = vec![0.0; 400];
        let mut ay = vec![0.0; 400];
        g.matvec(&data.x, &mut ax);
        g.matvec(&data.y, &mut ay);
        for i in 0..400 {
            let implied = data.y[i]
                - params.alpha
                - params.beta * data.x[i]
                - params.delta0 / dbar * ax[i]
                - params.rho0 / dbar * ay[i];
            assert!((implied - data.eps[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn lis_spectral_validity_error_reports_lambda() {
        let g = gen_bipartite_union(20, 5).unwrap();
        let params = LisParams {
            rho0: 6.0, // rho_n = 6/5, lambda_1 = 5 -> contraction 6 > 1
            ..Default::default()
        };
        let err = simulate_lis(&g, &params, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lambda_1"), "{msg}");
    }

    fn sample_corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va.sqrt() * vb.sqrt()).max(f64::MIN_POSITIVE)
    }
}
