//! Brute-force and dense reference implementations.
//!
//! These are deliberately slow, independent re-derivations of the fast
//! paths: an explicit walk enumerator for the cycle census, a dense
//! materialized-matrix recomputation of the moment report, and a
//! full-pipeline Monte Carlo reference. They validate every fast-path
//! quantity and every frozen expected value in the test suites; they are
//! not meant for production-scale inputs.

use nalgebra::{DMatrix, DVector};

use crate::dgp::LimParams;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentConfig, SummaryTable};
use crate::graph::{CycleCensus, Graph};
use crate::ops::{MomentReport, RowNormOp};

/// One fast-vs-oracle comparison.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub quantity: String,
    pub fast: f64,
    pub oracle: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn compare(quantity: &str, fast: f64, oracle: f64, tolerance: f64) -> Self {
        let abs_gap = (fast - oracle).abs();
        let rel_gap = abs_gap / oracle.abs().max(f64::MIN_POSITIVE);
        let pass = abs_gap <= tolerance || rel_gap <= tolerance;
        OracleReport {
            quantity: quantity.to_string(),
            fast,
            oracle,
            abs_gap,
            rel_gap,
            tolerance,
            pass,
        }
    }

    /// One line for the plain-text audit log.
    pub fn audit_line(&self) -> String {
        format!(
            "{} fast={:.12e} oracle={:.12e} abs={:.3e} rel={:.3e} tol={:.1e} {}",
            self.quantity,
            self.fast,
            self.oracle,
            self.abs_gap,
            self.rel_gap,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

const BRUTE_MAX_N: usize = 12;

/// Explicit enumeration of closed 3- and 4-walks, classifying the
/// degenerate forms, for graphs with at most 12 nodes.
///
/// Conventions match the fast census: `c3` counts all closed 3-walks,
/// `c4` counts closed 4-walks except pure single-edge back-and-forth
/// walks (`i -> j -> i -> j -> i`), and `open_triples` counts ordered
/// connected triples whose endpoints are not adjacent.
pub fn brute_cycle_census(g: &Graph) -> Result<CycleCensus> {
    let n = g.n();
    if n > BRUTE_MAX_N {
        return Err(Error::SizeLimit {
            op: "brute_cycle_census".into(),
            n,
            max: BRUTE_MAX_N,
        });
    }
    let mut adj = vec![vec![false; n]; n];
    for (i, j) in g.edges() {
        adj[i as usize][j as usize] = true;
        adj[j as usize][i as usize] = true;
    }
    let mut c3 = 0u64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if adj[i][j] && adj[j][k] && adj[k][i] {
                    c3 += 1;
                }
            }
        }
    }
    let mut closed4 = 0u64;
    let mut back_and_forth = 0u64;
    for i in 0..n {
        for j in 0..n {
            if !adj[i][j] {
                continue;
            }
            for k in 0..n {
                if !adj[j][k] {
                    continue;
                }
                for l in 0..n {
                    if adj[k][l] && adj[l][i] {
                        closed4 += 1;
                        if k == i && l == j {
                            back_and_forth += 1;
                        }
                    }
                }
            }
        }
    }
    let mut open_triples = 0u64;
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                if i != k && i != j && k != j && adj[i][j] && adj[j][k] && !adj[i][k] {
                    open_triples += 1;
                }
            }
        }
    }
    Ok(CycleCensus {
        c3,
        c4: closed4 - back_and_forth,
        open_triples,
    })
}

const DENSE_MAX_N: usize = 1500;

/// Dense recomputation of the moment report: materializes `G`, `S^{-1}`
/// (by direct LU solve), and `H` as explicit matrices and takes every
/// trace exactly. Guarded at `n <= 1500`.
pub fn dense_moment_oracle(g: &Graph, params: &LimParams) -> Result<MomentReport> {
    let n = g.n();
    if n > DENSE_MAX_N {
        return Err(Error::SizeLimit {
            op: "dense_moment_oracle".into(),
            n,
            max: DENSE_MAX_N,
        });
    }
    params.validate()?;
    let op = RowNormOp::new(g);
    let inv_deg = op.inv_degrees();
    let mut gd = DMatrix::zeros(n, n);
    for i in 0..n {
        for &j in g.neighbors(i) {
            gd[(i, j as usize)] = inv_deg[i];
        }
    }
    let s = DMatrix::identity(n, n) - params.rho * &gd;
    let lu = s.lu();
    let sinv = lu
        .solve(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Degenerate("dense resolvent solve".into()))?;
    let h = (DMatrix::identity(n, n) * params.beta + &gd * params.delta) * &sinv;
    let g2 = &gd * &gd;
    let gs = &gd * &sinv;
    let gh = &gd * &h;

    let frob = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>();
    let cross = |a: &DMatrix<f64>, b: &DMatrix<f64>| a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>();

    let fro_g_sq = frob(&gd);
    let fro_g2_sq = frob(&g2);
    let nf = n as f64;
    let tr_g2 = g2.trace();
    let tr_gh = gh.trace();

    let m_g_gh = cross(&gd, &gh) / fro_g_sq;
    let m_gh_gh = frob(&gh) / fro_g_sq;
    let m_gs_gs = frob(&gs) / fro_g_sq;
    let m_i_gs = gs.trace() / fro_g_sq;
    let mc_g2_gh = (cross(&g2, &gh) - tr_g2 * tr_gh / nf) / fro_g2_sq;
    let mc_g2_g2 = (fro_g2_sq - tr_g2 * tr_g2 / nf) / fro_g2_sq;
    let m_g_g2 = cross(&g2, &gd) / fro_g2_sq;
    let eta = (fro_g2_sq / fro_g_sq).sqrt();

    let s2 = params.sigma * params.sigma;
    let e2 = params.sigma_eps * params.sigma_eps;
    let gamma_ww = [
        [s2, s2 * m_g_gh],
        [s2 * m_g_gh, s2 * m_gh_gh + e2 * m_gs_gs],
    ];
    let sigma_ww = [
        [e2 * s2, e2 * s2 * m_g_gh],
        [e2 * s2 * m_g_gh, e2 * s2 * m_gh_gh],
    ];
    let det = gamma_ww[0][0] * gamma_ww[1][1] - gamma_ww[0][1] * gamma_ww[1][0];
    let scale = gamma_ww
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .powi(2);
    let (predicted_bias, predicted_cov_ols, degenerate) = if det.abs() < 1e-12 * scale.max(1e-300) {
        (None, None, Some(format!("gamma_ww singular: det = {det:.3e}")))
    } else {
        let inv = [
            [gamma_ww[1][1] / det, -gamma_ww[0][1] / det],
            [-gamma_ww[1][0] / det, gamma_ww[0][0] / det],
        ];
        let bias = [e2 * inv[0][1] * m_i_gs, e2 * inv[1][1] * m_i_gs];
        let mut cov = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        cov[i][j] += inv[i][a] * sigma_ww[a][b] * inv[b][j];
                    }
                }
            }
        }
        (Some(bias), Some(cov), None)
    };
    let sigma_zz = [[e2 * s2, 0.0], [0.0, e2 * s2]];
    let (gamma_zw_inv, predicted_cov_tsls) = if mc_g2_gh.abs() < 1e-14 {
        (None, None)
    } else {
        let inv = [
            [eta / s2, -m_g_gh / (s2 * mc_g2_gh)],
            [0.0, 1.0 / (s2 * mc_g2_gh)],
        ];
        let mut cov = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    cov[i][j] += inv[i][a] * sigma_zz[a][a] * inv[j][a];
                }
            }
        }
        (Some(inv), Some(cov))
    };

    Ok(MomentReport {
        n,
        sigma: params.sigma,
        sigma_eps: params.sigma_eps,
        fro_g_sq,
        fro_g2_sq,
        eta,
        m_g_g: 1.0,
        m_g_gh,
        m_gh_gh,
        m_gs_gs,
        m_i_gs,
        mc_g2_gh,
        mc_g2_g2,
        m_g2_g2: 1.0,
        tr_g2,
        tr_gh,
        m_g_g2,
        gamma_ww,
        sigma_ww,
        predicted_bias,
        predicted_cov_ols,
        gamma_zw_inv,
        sigma_zz,
        predicted_cov_tsls,
        degenerate,
        exact: true,
    })
}

/// Dense check that a simulated outcome satisfies its structural equation:
/// returns the maximum absolute residual of `(I - rho G) y - rhs`.
pub fn dense_structural_residual(
    g: &Graph,
    params: &LimParams,
    data: &crate::dgp::Dataset,
) -> Result<f64> {
    let n = g.n();
    if n > DENSE_MAX_N {
        return Err(Error::SizeLimit {
            op: "dense_structural_residual".into(),
            n,
            max: DENSE_MAX_N,
        });
    }
    let op = RowNormOp::new(g);
    let gx = op.apply_vec(&data.x);
    let gy = op.apply_vec(&data.y);
    let y = DVector::from_column_slice(&data.y);
    let mut max_resid = 0.0f64;
    for i in 0..n {
        let rhs = params.alpha + params.beta * data.x[i] + params.delta * gx[i] + data.eps[i];
        let lhs = y[i] - params.rho * gy[i];
        max_resid = max_resid.max((lhs - rhs).abs());
    }
    Ok(max_resid)
}

/// Runs the full experiment pipeline with independent derived seeds and
/// returns the per-grid-point summary (means, SDs, percentile bands,
/// failure counts). Estimator failures are counted, never fatal.
pub fn mc_reference(config: &ExperimentConfig, reps: usize) -> Result<SummaryTable> {
    let mut config = config.clone();
    config.replications = reps;
    let table = run_experiment(&config)?;
    Ok(table.summarize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_census, gen_bipartite_union, gen_clique_union, gen_erdos_renyi};
    use approx::assert_relative_eq;

    #[test]
    fn brute_census_hand_checked_values() {
        // K_3: six closed 3-walks, one triangle.
        let k3 = gen_clique_union(3, 2).unwrap();
        let census = brute_cycle_census(&k3).unwrap();
        assert_eq!(census.c3, 6);
        assert_eq!(census.open_triples, 0);

        // K_{2,2} (== the 4-cycle): Tr(A^4) = 32, minus 8 back-and-forth
        // walks leaves 24: 8 simple cycle walks plus 16 three-node walks.
        let k22 = gen_bipartite_union(4, 2).unwrap();
        let census = brute_cycle_census(&k22).unwrap();
        assert_eq!(census.c3, 0);
        assert_eq!(census.c4, 24);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let census = brute_cycle_census(&path).unwrap();
        assert_eq!(census.open_triples, 2);
        assert_eq!(census.c3, 0);
    }

    #[test]
    fn brute_census_size_guard() {
        let g = gen_erdos_renyi(13, 3.0, 0).unwrap();
        assert!(matches!(
            brute_cycle_census(&g),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn fast_census_matches_brute_on_small_graphs() {
        let mut corpus: Vec<Graph> = vec![
            gen_clique_union(3, 2).unwrap(),
            gen_clique_union(7, 2).unwrap(),
            gen_bipartite_union(4, 2).unwrap(),
            gen_bipartite_union(10, 2).unwrap(),
            Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
            Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(),
        ];
        for seed in 0..8 {
            corpus.push(gen_erdos_renyi(10 + (seed as usize % 3), 3.0, seed).unwrap());
        }
        for g in &corpus {
            let fast = cycle_census(g);
            let brute = brute_cycle_census(g).unwrap();
            assert_eq!(fast, brute, "census mismatch on n = {}", g.n());
        }
    }

    #[test]
    fn dense_oracle_matches_fast_moment_report() {
        use crate::ops::{moment_report, TraceOptions};
        let params = LimParams::default();
        for seed in [3u64, 4] {
            let g = gen_erdos_renyi(180, 8.0, seed).unwrap();
            let op = RowNormOp::new(&g);
            let fast = moment_report(&op, &params, &TraceOptions::default()).unwrap();
            let oracle = dense_moment_oracle(&g, &params).unwrap();
            assert_relative_eq!(fast.fro_g_sq, oracle.fro_g_sq, max_relative = 1e-8);
            assert_relative_eq!(fast.fro_g2_sq, oracle.fro_g2_sq, max_relative = 1e-8);
            assert_relative_eq!(fast.m_g_gh, oracle.m_g_gh, max_relative = 1e-8);
            assert_relative_eq!(fast.m_gh_gh, oracle.m_gh_gh, max_relative = 1e-8);
            assert_relative_eq!(fast.m_gs_gs, oracle.m_gs_gs, max_relative = 1e-8);
            assert_relative_eq!(fast.m_i_gs, oracle.m_i_gs, max_relative = 1e-8);
            assert_relative_eq!(fast.mc_g2_gh, oracle.mc_g2_gh, max_relative = 1e-8);
            assert_relative_eq!(fast.mc_g2_g2, oracle.mc_g2_g2, max_relative = 1e-8);
            let bf = fast.predicted_bias.unwrap();
            let bo = oracle.predicted_bias.unwrap();
            assert_relative_eq!(bf[0], bo[0], max_relative = 1e-8);
            assert_relative_eq!(bf[1], bo[1], max_relative = 1e-8);
        }
    }

    #[test]
    fn dense_oracle_zero_rho_bias_is_zero() {
        let g = gen_erdos_renyi(120, 6.0, 9).unwrap();
        let params = LimParams {
            rho: 0.0,
            ..Default::default()
        };
        let oracle = dense_moment_oracle(&g, &params).unwrap();
        let bias = oracle.predicted_bias.unwrap();
        assert!(bias[0].abs() < 1e-14 && bias[1].abs() < 1e-14);
    }

    #[test]
    fn dense_oracle_predicts_positive_rho_bias() {
        let g = gen_erdos_renyi(1000, 5.6, 123).unwrap();
        let params = LimParams::default();
        let oracle = dense_moment_oracle(&g, &params).unwrap();
        let bias = oracle.predicted_bias.unwrap();
        assert!(bias[1] > 0.0, "predicted rho bias {}", bias[1]);
    }

    #[test]
    fn oracle_report_tolerances() {
        let r = OracleReport::compare("x", 1.0, 1.0 + 1e-12, 1e-10);
        assert!(r.pass);
        let r = OracleReport::compare("x", 1.0, 2.0, 1e-10);
        assert!(!r.pass);
        assert!(r.audit_line().contains("FAIL"));
    }
}
