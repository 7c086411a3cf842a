//! The row-normalized operator `G`, the resolvent `S(rho)^{-1}`, the
//! reduced-form operator `H`, and trace/norm moments of operator words.
//!
//! Everything here is matrix-free: words are applied to vectors through
//! sparse products and iterative solves, and traces are accumulated either
//! exactly (column sweep over unit vectors, for `n` up to the dense
//! threshold) or stochastically (Hutchinson probes with a reported
//! standard error).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::derive_seed;

/// Row-normalized adjacency operator `G = D^{-1} A`.
///
/// Inverse degrees use the convention `1/d_i := 1` when `d_i = 0`, so the
/// operator is defined on every graph; isolated rows are zero rows.
pub struct RowNormOp<'g> {
    graph: &'g Graph,
    inv_deg: Vec<f64>,
}

impl<'g> RowNormOp<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let inv_deg = (0..graph.n())
            .map(|i| {
                let d = graph.degree(i);
                if d == 0 {
                    1.0
                } else {
                    1.0 / d as f64
                }
            })
            .collect();
        RowNormOp { graph, inv_deg }
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn inv_degrees(&self) -> &[f64] {
        &self.inv_deg
    }

    /// `out = G v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n() {
            let mut acc = 0.0;
            for &j in self.graph.neighbors(i) {
                acc += v[j as usize];
            }
            out[i] = acc * self.inv_deg[i];
        }
    }

    /// `out = G' v`.
    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.n() {
            let w = v[i] * self.inv_deg[i];
            for &j in self.graph.neighbors(i) {
                out[j as usize] += w;
            }
        }
    }

    /// `out = A v` (the unnormalized adjacency; symmetric).
    pub fn apply_adjacency(&self, v: &[f64], out: &mut [f64]) {
        self.graph.matvec(v, out);
    }

    /// Exact `||G||_F^2 = sum_{j: d_j > 0} 1/d_j` in closed form.
    pub fn frobenius_sq_closed_form(&self) -> f64 {
        (0..self.n())
            .filter(|&i| self.graph.degree(i) > 0)
            .map(|i| self.inv_deg[i])
            .sum()
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.apply(v, &mut out);
        out
    }
}

/// Parameters of the resolvent solve `(I - rho G) x = b`.
#[derive(Debug, Clone, Copy)]
pub struct ResolventSpec {
    pub rho: f64,
    /// Relative residual tolerance of the iterative solve.
    pub tol: f64,
    /// Optional cap on iterations; the default is
    /// `10 * ceil(log(1/tol) / log(1/|rho|))`.
    pub max_iter: Option<usize>,
}

impl ResolventSpec {
    pub fn new(rho: f64) -> Self {
        ResolventSpec {
            rho,
            tol: 1e-10,
            max_iter: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn iteration_budget(&self) -> usize {
        if let Some(m) = self.max_iter {
            return m;
        }
        if self.rho == 0.0 {
            return 1;
        }
        let per_digit = (1.0 / self.tol).ln() / (1.0 / self.rho.abs()).ln();
        (10.0 * per_digit.ceil()).max(10.0) as usize
    }
}

/// Solves `(I - rho G) x = b` (or the transposed system) by fixed-point
/// iteration `x <- b + rho G x`, geometric for `|rho| < 1` because
/// `||G||_inf <= 1`.
pub fn solve_resolvent(
    op: &RowNormOp,
    spec: &ResolventSpec,
    b: &[f64],
    transpose: bool,
) -> Result<Vec<f64>> {
    if spec.rho.abs() >= 1.0 {
        return Err(Error::SpectralValidity(format!(
            "|rho| = {} >= 1 for the row-normalized resolvent",
            spec.rho.abs()
        )));
    }
    if spec.rho == 0.0 {
        return Ok(b.to_vec());
    }
    let n = op.n();
    let b_norm = norm2(b).max(f64::MIN_POSITIVE);
    let mut x = b.to_vec();
    let mut gx = vec![0.0; n];
    let budget = spec.iteration_budget();
    let mut residual = f64::INFINITY;
    for _ in 0..budget {
        if transpose {
            op.apply_transpose(&x, &mut gx);
        } else {
            op.apply(&x, &mut gx);
        }
        // Residual of the current iterate: b - (x - rho G x).
        residual = 0.0;
        for i in 0..n {
            let r = b[i] - (x[i] - spec.rho * gx[i]);
            residual += r * r;
        }
        residual = residual.sqrt();
        if residual <= spec.tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            x[i] = b[i] + spec.rho * gx[i];
        }
    }
    // One final check after the last update.
    if transpose {
        op.apply_transpose(&x, &mut gx);
    } else {
        op.apply(&x, &mut gx);
    }
    let mut r2 = 0.0;
    for i in 0..n {
        let r = b[i] - (x[i] - spec.rho * gx[i]);
        r2 += r * r;
    }
    if r2.sqrt() <= spec.tol * b_norm {
        return Ok(x);
    }
    Err(Error::NonConvergence {
        what: "resolvent solve".into(),
        iterations: budget,
        residual: residual / b_norm,
    })
}

/// One factor of an operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpLetter {
    /// Identity.
    I,
    /// Row-normalized adjacency `G`.
    G,
    /// `G'`.
    Gt,
    /// Resolvent `S^{-1} = (I - rho G)^{-1}`.
    Sinv,
    /// `S^{-T}`.
    SinvT,
    /// Reduced-form operator `H = (beta I + delta G) S^{-1}`.
    H,
    /// `H'`.
    Ht,
    /// Unnormalized adjacency `A` (symmetric, so also `A'`).
    A,
}

/// A nonempty product of letters; `word[0] * word[1] * ...` read left to
/// right, applied to vectors right to left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorWord(Vec<OpLetter>);

impl OperatorWord {
    pub fn new(letters: Vec<OpLetter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidSpec("operator word must be nonempty".into()));
        }
        Ok(OperatorWord(letters))
    }

    pub fn letters(&self) -> &[OpLetter] {
        &self.0
    }

    /// True when the word involves the resolvent or reduced-form operator
    /// and therefore needs `rho` (and `beta`, `delta` for `H`).
    pub fn needs_theta(&self) -> bool {
        self.0.iter().any(|l| matches!(l, OpLetter::H | OpLetter::Ht))
    }
}

impl From<&[OpLetter]> for OperatorWord {
    fn from(letters: &[OpLetter]) -> Self {
        OperatorWord::new(letters.to_vec()).expect("nonempty word")
    }
}

/// Everything needed to evaluate a word: the operator, the resolvent
/// parameters, and the reduced-form coefficients.
pub struct WordContext<'g> {
    pub op: &'g RowNormOp<'g>,
    pub resolvent: ResolventSpec,
    pub beta: f64,
    pub delta: f64,
}

impl<'g> WordContext<'g> {
    pub fn new(op: &'g RowNormOp<'g>, rho: f64) -> Self {
        WordContext {
            op,
            resolvent: ResolventSpec::new(rho),
            beta: 0.0,
            delta: 0.0,
        }
    }

    pub fn with_theta(mut self, beta: f64, delta: f64) -> Self {
        self.beta = beta;
        self.delta = delta;
        self
    }

    fn apply_letter(&self, letter: OpLetter, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.op.n();
        let mut out = vec![0.0; n];
        match letter {
            OpLetter::I => out.copy_from_slice(v),
            OpLetter::G => self.op.apply(v, &mut out),
            OpLetter::Gt => self.op.apply_transpose(v, &mut out),
            OpLetter::A => self.op.apply_adjacency(v, &mut out),
            OpLetter::Sinv => out = solve_resolvent(self.op, &self.resolvent, v, false)?,
            OpLetter::SinvT => out = solve_resolvent(self.op, &self.resolvent, v, true)?,
            OpLetter::H => {
                // (beta I + delta G) S^{-1} v
                let t = solve_resolvent(self.op, &self.resolvent, v, false)?;
                self.op.apply(&t, &mut out);
                for i in 0..n {
                    out[i] = self.beta * t[i] + self.delta * out[i];
                }
            }
            OpLetter::Ht => {
                // S^{-T} (beta I + delta G') v
                let mut t = vec![0.0; n];
                self.op.apply_transpose(v, &mut t);
                for i in 0..n {
                    t[i] = self.beta * v[i] + self.delta * t[i];
                }
                out = solve_resolvent(self.op, &self.resolvent, &t, true)?;
            }
        }
        Ok(out)
    }

    /// Applies the word's matrix to `v` (factors applied right to left).
    pub fn apply_word(&self, word: &OperatorWord, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.op.n() {
            return Err(Error::InvalidSpec(format!(
                "vector length {} does not match n = {}",
                v.len(),
                self.op.n()
            )));
        }
        let mut cur = v.to_vec();
        for &letter in word.letters().iter().rev() {
            cur = self.apply_letter(letter, &cur)?;
        }
        Ok(cur)
    }
}

/// How traces are evaluated.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Largest `n` for the exact column sweep; above it, Hutchinson
    /// estimation with `probes` Rademacher vectors.
    pub dense_threshold: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            dense_threshold: 3000,
            probes: 200,
            seed: 0x7AC3,
        }
    }
}

/// Joint trace statistics of a pair of words `(M_a, M_b)`.
#[derive(Debug, Clone, Copy)]
pub struct TraceMoment {
    /// `Tr(M_a' M_b)`.
    pub cross: f64,
    pub trace_a: f64,
    pub trace_b: f64,
    /// `Tr(M_a' M_b) - Tr(M_a) Tr(M_b) / n`.
    pub centered: f64,
    /// True when computed by the exact column sweep.
    pub exact: bool,
    /// Hutchinson standard error of `cross` (None on the exact path).
    pub cross_se: Option<f64>,
}

struct ProbeStats {
    cross: Vec<f64>,
    diag_a: Vec<f64>,
    diag_b: Vec<f64>,
}

fn sweep_probes(
    ctx: &WordContext,
    wa: &OperatorWord,
    wb: &OperatorWord,
    opts: &TraceOptions,
) -> Result<(ProbeStats, bool)> {
    let n = ctx.op.n();
    let exact = n <= opts.dense_threshold;
    let probes: Vec<Vec<f64>> = if exact {
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect()
    } else {
        (0..opts.probes)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[k as u64]));
                (0..n)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect()
    };
    let results: Result<Vec<(f64, f64, f64)>> = probes
        .par_iter()
        .map(|p| {
            let ca = ctx.apply_word(wa, p)?;
            let cb = ctx.apply_word(wb, p)?;
            Ok((dot(&ca, &cb), dot(p, &ca), dot(p, &cb)))
        })
        .collect();
    let results = results?;
    let mut stats = ProbeStats {
        cross: Vec::with_capacity(results.len()),
        diag_a: Vec::with_capacity(results.len()),
        diag_b: Vec::with_capacity(results.len()),
    };
    for (c, a, b) in results {
        stats.cross.push(c);
        stats.diag_a.push(a);
        stats.diag_b.push(b);
    }
    Ok((stats, exact))
}

/// `Tr(M_a' M_b)` together with plain traces and the centered variant.
///
/// Exact for `n <= dense_threshold` (matrix-free column sweep), otherwise
/// a Hutchinson estimate with reported standard error.
pub fn trace_moment(
    ctx: &WordContext,
    wa: &OperatorWord,
    wb: &OperatorWord,
    opts: &TraceOptions,
) -> Result<TraceMoment> {
    let n = ctx.op.n() as f64;
    let (stats, exact) = sweep_probes(ctx, wa, wb, opts)?;
    let k = stats.cross.len() as f64;
    let (cross, trace_a, trace_b, cross_se) = if exact {
        (
            stats.cross.iter().sum(),
            stats.diag_a.iter().sum(),
            stats.diag_b.iter().sum(),
            None,
        )
    } else {
        let mean = stats.cross.iter().sum::<f64>() / k;
        let var = stats
            .cross
            .iter()
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0);
        (
            mean,
            stats.diag_a.iter().sum::<f64>() / k,
            stats.diag_b.iter().sum::<f64>() / k,
            Some((var / k).sqrt()),
        )
    };
    Ok(TraceMoment {
        cross,
        trace_a,
        trace_b,
        centered: cross - trace_a * trace_b / n,
        exact,
        cross_se,
    })
}

/// Exact or estimated `||M||_F^2` for a word's matrix.
///
/// The single-letter word `[G]` short-circuits to the closed form
/// `sum_j 1/d_j` over non-isolated nodes.
pub fn frobenius_sq(
    ctx: &WordContext,
    word: &OperatorWord,
    opts: &TraceOptions,
) -> Result<TraceMoment> {
    if word.letters() == [OpLetter::G] {
        let v = ctx.op.frobenius_sq_closed_form();
        return Ok(TraceMoment {
            cross: v,
            trace_a: 0.0,
            trace_b: 0.0,
            centered: v,
            exact: true,
            cross_se: None,
        });
    }
    trace_moment(ctx, word, word, opts)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Finite-n network moment proxies and the limit-theory predictions built
/// from them.
///
/// Normalizations: `m_*` entries divide by `||G||_F^2`; primed (centered)
/// entries divide by `||G^2||_F^2` after subtracting `Tr Tr / n`.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub n: usize,
    pub sigma: f64,
    pub sigma_eps: f64,
    pub fro_g_sq: f64,
    pub fro_g2_sq: f64,
    /// `||G^2||_F / ||G||_F`.
    pub eta: f64,
    /// Always exactly 1 (definitional normalization).
    pub m_g_g: f64,
    pub m_g_gh: f64,
    pub m_gh_gh: f64,
    pub m_gs_gs: f64,
    /// `Tr(G S^{-1}) / ||G||_F^2`.
    pub m_i_gs: f64,
    /// Centered `G^2` moments, normalized by `||G^2||_F^2`.
    pub mc_g2_gh: f64,
    pub mc_g2_g2: f64,
    /// Uncentered `Tr((G^2)' G^2) / ||G^2||_F^2`, identically 1.
    pub m_g2_g2: f64,
    pub tr_g2: f64,
    pub tr_gh: f64,
    /// `Tr(G' G^2) / ||G^2||_F^2`, the triangle-driven term.
    pub m_g_g2: f64,
    /// 2x2 limiting moment matrix of the partialled regressors.
    pub gamma_ww: [[f64; 2]; 2],
    pub sigma_ww: [[f64; 2]; 2],
    /// Predicted OLS bias vector for (delta, rho); None when gamma_ww is
    /// numerically singular.
    pub predicted_bias: Option<[f64; 2]>,
    /// Predicted covariance of `||G||_F * (theta2_hat - theta2 - bias)`.
    pub predicted_cov_ols: Option<[[f64; 2]; 2]>,
    /// Inverse cross-moment matrix for 2SLS; None when the pivot moment
    /// vanishes.
    pub gamma_zw_inv: Option<[[f64; 2]; 2]>,
    /// Instrument score covariance; the (2,2) entry uses the uncentered
    /// normalized moment (the centered variant is `mc_g2_g2`).
    pub sigma_zz: [[f64; 2]; 2],
    /// Predicted covariance of `||G^2||_F * (theta2_hat - theta2)` for 2SLS.
    pub predicted_cov_tsls: Option<[[f64; 2]; 2]>,
    /// Set when the WW moment matrix was too close to singular to invert.
    pub degenerate: Option<String>,
    pub exact: bool,
}

fn mat2_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat2_transpose(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn det2(a: [[f64; 2]; 2]) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Computes every moment the OLS and 2SLS limit theory needs in one shared
/// sweep (exact columns below the dense threshold, Hutchinson probes
/// above), then assembles the predicted bias and covariance matrices.
pub fn moment_report(
    op: &RowNormOp,
    params: &crate::dgp::LimParams,
    opts: &TraceOptions,
) -> Result<MomentReport> {
    params.validate()?;
    let n = op.n();
    let ctx = WordContext::new(op, params.rho).with_theta(params.beta, params.delta);
    let exact = n <= opts.dense_threshold;

    let probe_count = if exact { n } else { opts.probes };
    let accum: Result<Vec<[f64; 10]>> = (0..probe_count)
        .into_par_iter()
        .map(|k| {
            let probe: Vec<f64> = if exact {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                e
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[k as u64]));
                (0..n)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            };
            let mut g = vec![0.0; n];
            op.apply(&probe, &mut g);
            let mut g2 = vec![0.0; n];
            op.apply(&g, &mut g2);
            let s = solve_resolvent(op, &ctx.resolvent, &probe, false)?;
            let mut gs = vec![0.0; n];
            op.apply(&s, &mut gs);
            // H e = beta * s + delta * G s
            let h: Vec<f64> = (0..n)
                .map(|i| params.beta * s[i] + params.delta * gs[i])
                .collect();
            let mut gh = vec![0.0; n];
            op.apply(&h, &mut gh);
            Ok([
                dot(&g, &g),       // ||G||_F^2 contribution
                dot(&g, &gh),      // Tr(G' G H)
                dot(&gh, &gh),     // Tr((GH)' GH)
                dot(&gs, &gs),     // Tr((GS^-1)' GS^-1)
                dot(&probe, &gs),  // Tr(G S^-1)
                dot(&g2, &g2),     // ||G^2||_F^2
                dot(&g2, &gh),     // Tr((G^2)' GH)
                dot(&probe, &g2),  // Tr(G^2)
                dot(&probe, &gh),  // Tr(GH)
                dot(&g2, &g),      // Tr((G^2)' G)
            ])
        })
        .collect();
    let accum = accum?;
    let mut sums = [0.0f64; 10];
    for row in &accum {
        for (s, v) in sums.iter_mut().zip(row.iter()) {
            *s += v;
        }
    }
    if !exact {
        let k = accum.len() as f64;
        for s in sums.iter_mut() {
            *s /= k;
        }
    }
    let [tr_gg, tr_g_gh, tr_gh_gh, tr_gs_gs, tr_gs, fro_g2_sq, tr_g2_gh, tr_g2, tr_gh, tr_g2_g] =
        sums;

    let fro_g_sq = tr_gg;
    let nf = n as f64;
    let m_g_gh = tr_g_gh / fro_g_sq;
    let m_gh_gh = tr_gh_gh / fro_g_sq;
    let m_gs_gs = tr_gs_gs / fro_g_sq;
    let m_i_gs = tr_gs / fro_g_sq;
    let mc_g2_gh = (tr_g2_gh - tr_g2 * tr_gh / nf) / fro_g2_sq;
    let mc_g2_g2 = (fro_g2_sq - tr_g2 * tr_g2 / nf) / fro_g2_sq;
    let m_g_g2 = tr_g2_g / fro_g2_sq;
    let eta = (fro_g2_sq / fro_g_sq).sqrt();

    let s2 = params.sigma * params.sigma;
    let e2 = params.sigma_eps * params.sigma_eps;
    let gamma_ww = [
        [s2 * 1.0, s2 * m_g_gh],
        [s2 * m_g_gh, s2 * m_gh_gh + e2 * m_gs_gs],
    ];
    let sigma_ww = [
        [e2 * s2 * 1.0, e2 * s2 * m_g_gh],
        [e2 * s2 * m_g_gh, e2 * s2 * m_gh_gh],
    ];

    let det = det2(gamma_ww);
    let scale = gamma_ww
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .powi(2);
    let (predicted_bias, predicted_cov_ols, degenerate) = if det.abs() < 1e-12 * scale.max(1e-300) {
        (
            None,
            None,
            Some(format!(
                "gamma_ww numerically singular: det = {det:.3e}, scale = {scale:.3e}"
            )),
        )
    } else {
        let inv = [
            [gamma_ww[1][1] / det, -gamma_ww[0][1] / det],
            [-gamma_ww[1][0] / det, gamma_ww[0][0] / det],
        ];
        let bias = [e2 * inv[0][1] * m_i_gs, e2 * inv[1][1] * m_i_gs];
        let cov = mat2_mul(mat2_mul(inv, sigma_ww), inv);
        (Some(bias), Some(cov), None)
    };

    let sigma_zz = [[e2 * s2 * 1.0, 0.0], [0.0, e2 * s2 * 1.0]];
    let (gamma_zw_inv, predicted_cov_tsls) = if mc_g2_gh.abs() < 1e-14 {
        (None, None)
    } else {
        let inv = [
            [eta / s2, -m_g_gh / (s2 * 1.0 * mc_g2_gh)],
            [0.0, 1.0 / (s2 * mc_g2_gh)],
        ];
        let cov = mat2_mul(mat2_mul(inv, sigma_zz), mat2_transpose(inv));
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
        exact,
    })
}

impl MomentReport {
    /// Predicted standard deviation of the OLS error in (delta, rho) at
    /// this n: `sqrt(diag(cov)) / ||G||_F`.
    pub fn predicted_sd_ols(&self) -> Option<[f64; 2]> {
        self.predicted_cov_ols.map(|c| {
            [
                (c[0][0].max(0.0)).sqrt() / self.fro_g_sq.sqrt(),
                (c[1][1].max(0.0)).sqrt() / self.fro_g_sq.sqrt(),
            ]
        })
    }

    /// Predicted standard deviation of the 2SLS error in (delta, rho).
    pub fn predicted_sd_tsls(&self) -> Option<[f64; 2]> {
        self.predicted_cov_tsls.map(|c| {
            [
                (c[0][0].max(0.0)).sqrt() / self.fro_g2_sq.sqrt(),
                (c[1][1].max(0.0)).sqrt() / self.fro_g2_sq.sqrt(),
            ]
        })
    }

    /// Flat `name = value` text record, one entry per line.
    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let mut push = |k: &str, v: f64| s.push_str(&format!("{k} = {v}\n"));
        push("n", self.n as f64);
        push("sigma", self.sigma);
        push("sigma_eps", self.sigma_eps);
        push("fro_g_sq", self.fro_g_sq);
        push("fro_g2_sq", self.fro_g2_sq);
        push("eta", self.eta);
        push("m_g_g", self.m_g_g);
        push("m_g_gh", self.m_g_gh);
        push("m_gh_gh", self.m_gh_gh);
        push("m_gs_gs", self.m_gs_gs);
        push("m_i_gs", self.m_i_gs);
        push("mc_g2_gh", self.mc_g2_gh);
        push("mc_g2_g2", self.mc_g2_g2);
        push("m_g2_g2", self.m_g2_g2);
        push("tr_g2", self.tr_g2);
        push("tr_gh", self.tr_gh);
        push("m_g_g2", self.m_g_g2);
        for i in 0..2 {
            for j in 0..2 {
                push(&format!("gamma_ww_{i}{j}"), self.gamma_ww[i][j]);
                push(&format!("sigma_ww_{i}{j}"), self.sigma_ww[i][j]);
                push(&format!("sigma_zz_{i}{j}"), self.sigma_zz[i][j]);
            }
        }
        if let Some(b) = self.predicted_bias {
            push("bias_delta", b[0]);
            push("bias_rho", b[1]);
        }
        if let Some(sd) = self.predicted_sd_ols() {
            push("sd_ols_delta", sd[0]);
            push("sd_ols_rho", sd[1]);
        }
        if let Some(sd) = self.predicted_sd_tsls() {
            push("sd_tsls_delta", sd[0]);
            push("sd_tsls_rho", sd[1]);
        }
        s.push_str(&format!("exact = {}\n", self.exact));
        if let Some(d) = &self.degenerate {
            s.push_str(&format!("degenerate = {d}\n"));
        }
        s
    }
}
