//! Strong-identification diagnostics for the linear-in-sums model.
//!
//! Identification needs the instrument moment matrix to stay invertible in
//! the limit. Three routes are implemented: the block-model spectral
//! condition (at least three distinct eigenvalues whose eigenvectors are
//! not orthogonal to the constant), the graphon degree/codegree condition
//! (linear independence of 1, the degree function, and the codegree
//! function), and the instrument-relevance curvature condition.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgp::LisParams;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Block-model description: symmetric connectivity matrix and community
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub p: DMatrix<f64>,
    pub pi: DVector<f64>,
}

impl SbmSpec {
    pub fn new(p: DMatrix<f64>, pi: DVector<f64>) -> Result<Self> {
        let k = p.nrows();
        if k == 0 || p.ncols() != k || pi.len() != k {
            return Err(Error::InvalidSpec(
                "block matrix must be square and match the membership vector".into(),
            ));
        }
        for i in 0..k {
            for j in 0..k {
                if p[(i, j)] < 0.0 {
                    return Err(Error::InvalidSpec("block matrix entries must be >= 0".into()));
                }
                if (p[(i, j)] - p[(j, i)]).abs() > 1e-10 {
                    return Err(Error::InvalidSpec("block matrix must be symmetric".into()));
                }
            }
        }
        let sum: f64 = pi.iter().sum();
        if pi.iter().any(|&x| x <= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(
                "membership probabilities must be positive and sum to 1".into(),
            ));
        }
        Ok(SbmSpec { p, pi })
    }

    pub fn from_rows(p: &[Vec<f64>], pi: &[f64]) -> Result<Self> {
        let k = p.len();
        let mat = DMatrix::from_fn(k, k, |i, j| p[i][j]);
        SbmSpec::new(mat, DVector::from_column_slice(pi))
    }

    /// `E = P diag(pi)`, whose eigenvalues are those of the associated
    /// step-kernel operator.
    pub fn e_matrix(&self) -> DMatrix<f64> {
        let k = self.p.nrows();
        DMatrix::from_fn(k, k, |i, j| self.p[(i, j)] * self.pi[j])
    }

    /// Recovers the connectivity matrix from `E = P diag(pi)`.
    pub fn from_e_matrix(e: DMatrix<f64>, pi: DVector<f64>) -> Result<Self> {
        let k = e.nrows();
        if e.ncols() != k || pi.len() != k || pi.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidSpec("bad E matrix or membership vector".into()));
        }
        let p = DMatrix::from_fn(k, k, |i, j| e[(i, j)] / pi[j]);
        SbmSpec::new(p, pi)
    }

    /// Evaluates the associated step kernel at latent positions `(u, v)`.
    pub fn kernel(&self, u: f64, v: f64) -> f64 {
        self.p[(self.block_of(u), self.block_of(v))]
    }

    fn block_of(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, &w) in self.pi.iter().enumerate() {
            acc += w;
            if u < acc {
                return k;
            }
        }
        self.pi.len() - 1
    }

    /// Block boundaries in [0, 1] (cumulative membership probabilities).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut acc = 0.0;
        for &w in self.pi.iter() {
            acc += w;
            out.push(acc);
        }
        let last = out.len() - 1;
        out[last] = 1.0;
        out
    }

    /// Mean edge density of the kernel, `pi' P pi`.
    pub fn mean_density(&self) -> f64 {
        let pv = &self.p * &self.pi;
        self.pi.dot(&pv)
    }
}

/// Why identification failed (present when `identified` is false).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    TooFewDistinctEigenvalues,
    OrthogonalEigenvector,
    CurvatureZero,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Witness::TooFewDistinctEigenvalues => "too-few-distinct-eigenvalues",
            Witness::OrthogonalEigenvector => "orthogonal-eigenvector",
            Witness::CurvatureZero => "curvature-zero",
        })
    }
}

/// Outcome of an identification check, with the evidence that produced it.
#[derive(Debug, Clone)]
pub struct IdentificationVerdict {
    pub identified: bool,
    /// Eigenvalues ascending (empty for the quadrature-only check).
    pub eigenvalues: Vec<f64>,
    /// Overlap magnitudes `|<phi_i, 1>|` aligned with `eigenvalues`.
    pub overlaps: Vec<f64>,
    pub witness: Option<Witness>,
    pub tol_eig: f64,
    pub tol_overlap: f64,
    /// Smallest eigenvalue of the Gram matrix of {1, g1, g2} when the
    /// degree/codegree route ran.
    pub min_gram_eig: Option<f64>,
    /// Relevance curvature `(alpha + mu beta) rho0 + mu delta0`.
    pub kappa: Option<f64>,
    /// Smallest singular value of the spectral relevance matrix.
    pub min_sv_gamma_zw: Option<f64>,
}

impl IdentificationVerdict {
    /// Machine row: `identified,witness,min_gram_eig,kappa`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.identified,
            self.witness.map(|w| w.to_string()).unwrap_or_else(|| "-".into()),
            self.min_gram_eig.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            self.kappa.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
        )
    }

    /// Human-readable report block.
    pub fn report(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "identified: {}\n",
            if self.identified { "yes" } else { "no" }
        ));
        if let Some(w) = self.witness {
            s.push_str(&format!("witness: {w}\n"));
        }
        if !self.eigenvalues.is_empty() {
            s.push_str("eigenvalues (overlap |<phi,1>|):\n");
            for (lam, a) in self.eigenvalues.iter().zip(&self.overlaps) {
                s.push_str(&format!("  {lam:+.6}  ({a:.3e})\n"));
            }
        }
        if let Some(g) = self.min_gram_eig {
            s.push_str(&format!("min gram eigenvalue: {g:.3e}\n"));
        }
        if let Some(k) = self.kappa {
            s.push_str(&format!("kappa: {k:.6}\n"));
        }
        if let Some(sv) = self.min_sv_gamma_zw {
            s.push_str(&format!("min singular value of relevance matrix: {sv:.3e}\n"));
        }
        s.push_str(&format!(
            "tolerances: eig {:.1e}, overlap {:.1e}\n",
            self.tol_eig, self.tol_overlap
        ));
        s
    }
}

/// Default tolerances: eigenvalues within `1e-8 * spectral radius` are
/// merged; overlaps below `5e-4` count as orthogonal (large enough to
/// absorb the rounding in published matrices, small enough that 1e-2
/// perturbations clear it); the degree/codegree Gram rank test uses its
/// own near-exact relative threshold since that condition is algebraic.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub eig: f64,
    pub overlap: f64,
    pub gram: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-8,
            overlap: 5e-4,
            gram: 1e-9,
        }
    }
}

/// Eigenvalues of `E = P diag(pi)` with overlaps computed in the
/// pi-weighted geometry (where the step-kernel operator is symmetric).
///
/// Returns `(eigenvalues, overlaps)` sorted ascending by eigenvalue.
pub fn sbm_spectrum(spec: &SbmSpec) -> (Vec<f64>, Vec<f64>) {
    let k = spec.p.nrows();
    let sqrt_pi: Vec<f64> = spec.pi.iter().map(|&x| x.sqrt()).collect();
    // diag(sqrt pi) P diag(sqrt pi) is symmetric and similar to P diag(pi).
    let sym = DMatrix::from_fn(k, k, |i, j| sqrt_pi[i] * spec.p[(i, j)] * sqrt_pi[j]);
    let eig = sym.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|idx| {
            let overlap: f64 = (0..k)
                .map(|r| eig.eigenvectors[(r, idx)] * sqrt_pi[r])
                .sum();
            (eig.eigenvalues[idx], overlap.abs())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Clusters eigenvalues within `tol_abs` and aggregates the squared
/// overlaps per cluster; returns `(representative eigenvalue, overlap)`.
fn cluster_spectrum(eigenvalues: &[f64], overlaps: &[f64], tol_abs: f64) -> Vec<(f64, f64)> {
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    for (&lam, &a) in eigenvalues.iter().zip(overlaps) {
        match clusters.last_mut() {
            Some((rep, acc)) if (lam - *rep).abs() <= tol_abs => {
                *acc += a * a;
            }
            _ => clusters.push((lam, a * a)),
        }
    }
    clusters.into_iter().map(|(l, a2)| (l, a2.sqrt())).collect()
}

/// Builds a verdict from an eigenvalue/overlap list: identified iff at
/// least three distinct eigenvalue clusters carry overlap above tolerance.
pub fn spectral_verdict(
    eigenvalues: Vec<f64>,
    overlaps: Vec<f64>,
    tols: &Tolerances,
) -> IdentificationVerdict {
    let radius = eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let clusters = cluster_spectrum(&eigenvalues, &overlaps, tols.eig * radius.max(1e-300));
    let distinct = clusters.len();
    let informative = clusters
        .iter()
        .filter(|(_, a)| *a > tols.overlap)
        .count();
    let identified = informative >= 3;
    let witness = if identified {
        None
    } else if distinct < 3 {
        Some(Witness::TooFewDistinctEigenvalues)
    } else {
        Some(Witness::OrthogonalEigenvector)
    };
    IdentificationVerdict {
        identified,
        eigenvalues,
        overlaps,
        witness,
        tol_eig: tols.eig,
        tol_overlap: tols.overlap,
        min_gram_eig: None,
        kappa: None,
        min_sv_gamma_zw: None,
    }
}

/// Spectral identification check for a block model: identified iff at
/// least three distinct eigenvalues of `E = P diag(pi)` carry eigenvectors
/// not orthogonal to the constant function.
pub fn sbm_identification(spec: &SbmSpec, tols: &Tolerances) -> Result<IdentificationVerdict> {
    let (eigenvalues, overlaps) = sbm_spectrum(spec);
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("block-model eigendecomposition".into()));
    }
    Ok(spectral_verdict(eigenvalues, overlaps, tols))
}

/// Midpoint quadrature grid; `blocked` grids place `per_block` nodes inside
/// each interval so that step kernels are integrated exactly.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn uniform(n: usize) -> Self {
        let w = 1.0 / n as f64;
        QuadGrid {
            nodes: (0..n).map(|i| (i as f64 + 0.5) * w).collect(),
            weights: vec![w; n],
        }
    }

    /// Grid aligned with interval breakpoints (ascending, starting at 0 and
    /// ending at 1), `per_block` midpoint nodes inside each interval.
    pub fn blocked(breakpoints: &[f64], per_block: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for win in breakpoints.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= a {
                continue;
            }
            let w = (b - a) / per_block as f64;
            for i in 0..per_block {
                nodes.push(a + (i as f64 + 0.5) * w);
                weights.push(w);
            }
        }
        QuadGrid { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn integral(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Applies the kernel operator on the grid: `(T g)(u_i) = sum_j w_j
    /// f(u_i, u_j) g(u_j)`.
    fn apply_kernel<F: Fn(f64, f64) -> f64>(&self, f: &F, g: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.weights[j] * f(self.nodes[i], self.nodes[j]) * g[j])
                    .sum()
            })
            .collect()
    }
}

/// Path-moment sequence `m_0..m_kmax` of a kernel by tensor-grid
/// quadrature: `m_k = <1, T^k 1>`.
pub fn graphon_moments<F: Fn(f64, f64) -> f64>(
    f: &F,
    k_max: usize,
    grid: &QuadGrid,
) -> Result<Vec<f64>> {
    if k_max > 6 {
        return Err(Error::InvalidSpec(format!(
            "moment order capped at 6, got {k_max}"
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidSpec("empty quadrature grid".into()));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    let mut g = vec![1.0; grid.len()];
    out.push(1.0);
    for _ in 1..=k_max {
        g = grid.apply_kernel(f, &g);
        out.push(grid.integral(&g));
    }
    Ok(out)
}

/// Exact path moments of a block model: `m_k = pi' (P diag(pi))^k 1`.
pub fn sbm_moments(spec: &SbmSpec, k_max: usize) -> Vec<f64> {
    let e = spec.e_matrix();
    let mut out = Vec::with_capacity(k_max + 1);
    let mut v = DVector::from_element(spec.pi.len(), 1.0);
    out.push(1.0);
    for _ in 1..=k_max {
        v = &e * &v;
        out.push(spec.pi.dot(&v));
    }
    out
}

/// Spectral path moments from an eigenvalue/overlap list:
/// `m_k = sum_i a_i^2 lambda_i^k`.
pub fn spectral_moments(eigenvalues: &[f64], overlaps: &[f64], k_max: usize) -> Vec<f64> {
    (0..=k_max)
        .map(|k| {
            eigenvalues
                .iter()
                .zip(overlaps)
                .map(|(&l, &a)| a * a * l.powi(k as i32))
                .sum()
        })
        .collect()
}

/// Degree/codegree identification check: the limiting instrument moment
/// matrix is invertible iff `1`, the degree function `g1(u) = int f(u,v)`
/// and the codegree function `g2 = T g1` are linearly independent.
///
/// The verdict compares the smallest eigenvalue of the 3x3 Gram matrix of
/// `{1, g1, g2}` against `tol_gram * largest eigenvalue`.
pub fn degree_codegree_check<F: Fn(f64, f64) -> f64>(
    f: &F,
    grid: &QuadGrid,
    tols: &Tolerances,
) -> IdentificationVerdict {
    let ones = vec![1.0; grid.len()];
    let g1 = grid.apply_kernel(f, &ones);
    let g2 = grid.apply_kernel(f, &g1);
    let funcs = [&ones[..], &g1[..], &g2[..]];
    let mut gram = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let prod: Vec<f64> = funcs[i]
                .iter()
                .zip(funcs[j])
                .map(|(a, b)| a * b)
                .collect();
            gram[(i, j)] = grid.integral(&prod);
        }
    }
    let eig = gram.symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let max_eig = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let identified = min_eig > tols.gram * max_eig.max(1e-300);
    IdentificationVerdict {
        identified,
        eigenvalues: Vec::new(),
        overlaps: Vec::new(),
        witness: if identified {
            None
        } else {
            Some(Witness::TooFewDistinctEigenvalues)
        },
        tol_eig: tols.eig,
        tol_overlap: tols.overlap,
        min_gram_eig: Some(min_eig),
        kappa: None,
        min_sv_gamma_zw: None,
    }
}

/// Discretized spectrum of a general kernel: eigenvalues and overlaps of
/// the symmetrized grid operator. Exact for step kernels on aligned grids;
/// `O(1/grid)` accurate for Lipschitz kernels.
pub fn graphon_spectrum<F: Fn(f64, f64) -> f64>(
    f: &F,
    grid: &QuadGrid,
    keep: usize,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| sw[i] * f(grid.nodes[i], grid.nodes[j]) * sw[j]);
    let eig = sym.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|idx| {
            let overlap: f64 = (0..n).map(|r| eig.eigenvectors[(r, idx)] * sw[r]).sum();
            (eig.eigenvalues[idx], overlap.abs())
        })
        .collect();
    // Keep the eigenvalues of largest magnitude; the rest are
    // discretization noise around zero.
    pairs.sort_by(|a, b| b.0.abs().partial_cmp(&a.0.abs()).unwrap());
    pairs.truncate(keep);
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// The source of a spectrum for the relevance check.
pub enum IdentifySource<'a> {
    Sbm(&'a SbmSpec),
    /// Kernel with a quadrature grid and the number of eigenvalues to keep.
    Graphon {
        f: &'a dyn Fn(f64, f64) -> f64,
        grid: &'a QuadGrid,
        keep: usize,
    },
}

/// Instrument-relevance check: identified iff the spectral condition holds
/// and the curvature `kappa = (alpha + mu beta) rho0 + mu delta0` is
/// nonzero. Also builds the 3x3 spectral relevance matrix with rows
/// `sum_i a_i^2 lambda_i^m (1, lambda_i, h(lambda_i))` and reports its
/// smallest singular value.
pub fn relevance_check(
    source: &IdentifySource,
    params: &LisParams,
    tols: &Tolerances,
) -> Result<IdentificationVerdict> {
    let (eigenvalues, overlaps) = match source {
        IdentifySource::Sbm(spec) => sbm_spectrum(spec),
        IdentifySource::Graphon { f, grid, keep } => graphon_spectrum(f, grid, *keep),
    };
    // Spectral validity: the resolvent factor 1/(1 - rho0 lambda) must be
    // defined at every retained eigenvalue.
    for (&lam, &a) in eigenvalues.iter().zip(&overlaps) {
        if a > tols.overlap && (params.rho0 * lam).abs() >= 1.0 {
            return Err(Error::SpectralValidity(format!(
                "|rho0 * lambda| = {} >= 1 at lambda = {lam}",
                (params.rho0 * lam).abs()
            )));
        }
    }
    let mut verdict = spectral_verdict(eigenvalues.clone(), overlaps.clone(), tols);
    let kappa = (params.alpha + params.mu * params.beta) * params.rho0 + params.mu * params.delta0;
    verdict.kappa = Some(kappa);
    let kappa_scale = (params.alpha.abs() + params.mu.abs() * params.beta.abs())
        .max(params.mu.abs() * params.delta0.abs())
        .max(1.0);
    if kappa.abs() <= 1e-10 * kappa_scale {
        verdict.identified = false;
        verdict.witness = Some(Witness::CurvatureZero);
    }
    // Spectral relevance matrix.
    let h = |lam: f64| lam * (params.alpha + params.mu * params.beta + params.mu * params.delta0 * lam)
        / (1.0 - params.rho0 * lam);
    let mut gamma_zw: DMatrix<f64> = DMatrix::zeros(3, 3);
    for (&lam, &a) in eigenvalues.iter().zip(&overlaps) {
        let a2 = a * a;
        for (m, lam_m) in [1.0, lam, lam * lam].into_iter().enumerate() {
            gamma_zw[(m, 0)] += a2 * lam_m;
            gamma_zw[(m, 1)] += a2 * lam_m * lam;
            gamma_zw[(m, 2)] += a2 * lam_m * h(lam);
        }
    }
    let svd = gamma_zw.svd(false, false);
    verdict.min_sv_gamma_zw = Some(
        svd.singular_values
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b)),
    );
    Ok(verdict)
}

/// Fraction of random perturbations of `E = P diag(pi)` that restore
/// identification: symmetric additive uniform noise of the given
/// magnitude, clipped to keep entries non-negative, memberships fixed.
pub fn perturbation_identified_rate(
    spec: &SbmSpec,
    magnitude: f64,
    trials: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<f64> {
    let e = spec.e_matrix();
    let k = e.nrows();
    let mut hits = 0usize;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[t as u64]));
        let mut noise = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = rng.gen_range(-magnitude..magnitude);
                noise[(i, j)] = v;
                noise[(j, i)] = v;
            }
        }
        let perturbed = DMatrix::from_fn(k, k, |i, j| (e[(i, j)] + noise[(i, j)]).clamp(0.0, 1.0));
        let spec_p = SbmSpec::from_e_matrix(perturbed, spec.pi.clone())?;
        if sbm_identification(&spec_p, tols)?.identified {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn disconnected_example() -> SbmSpec {
        // E = (1/3) [[1,0,0],[0,1,1/2],[0,1/2,1]] with uniform memberships.
        let e = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.0 / 3.0,
                0.0,
                0.0,
                0.0,
                1.0 / 3.0,
                1.0 / 6.0,
                0.0,
                1.0 / 6.0,
                1.0 / 3.0,
            ],
        );
        SbmSpec::from_e_matrix(e, DVector::from_element(3, 1.0 / 3.0)).unwrap()
    }

    fn positive_counterexample() -> SbmSpec {
        let e = DMatrix::from_row_slice(
            3,
            3,
            &[
                0.2321, 0.0718, 0.0295, 0.0718, 0.0728, 0.0287, 0.0295, 0.0287, 0.0618,
            ],
        );
        SbmSpec::from_e_matrix(e, DVector::from_element(3, 1.0 / 3.0)).unwrap()
    }

    fn healthy_k3() -> SbmSpec {
        SbmSpec::from_rows(
            &[
                vec![0.9, 0.5, 0.2],
                vec![0.5, 0.7, 0.35],
                vec![0.2, 0.35, 0.55],
            ],
            &[1.0 / 3.0; 3],
        )
        .unwrap()
    }

    #[test]
    fn disconnected_example_not_identified() {
        let verdict = sbm_identification(&disconnected_example(), &Tolerances::default()).unwrap();
        assert!(!verdict.identified);
        assert_eq!(verdict.witness, Some(Witness::OrthogonalEigenvector));
        // Direct computation gives eigenvalues {1/6, 1/3, 1/2}.
        let eigs = &verdict.eigenvalues;
        assert_relative_eq!(eigs[0], 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(eigs[1], 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(eigs[2], 0.5, epsilon = 1e-12);
        // The bottom eigenvector is (0, 1, -1)/sqrt(2), orthogonal to 1.
        assert!(verdict.overlaps[0] < 1e-12);
    }

    #[test]
    fn positive_counterexample_not_identified() {
        let verdict =
            sbm_identification(&positive_counterexample(), &Tolerances::default()).unwrap();
        assert!(!verdict.identified);
        assert_eq!(verdict.witness, Some(Witness::OrthogonalEigenvector));
        // Published to four decimals, so orthogonality holds only to ~1e-3.
        assert!(verdict.overlaps[0] < 1e-3, "overlap {}", verdict.overlaps[0]);
    }

    #[test]
    fn healthy_block_model_identified() {
        let verdict = sbm_identification(&healthy_k3(), &Tolerances::default()).unwrap();
        assert!(verdict.identified);
        assert!(verdict.witness.is_none());
    }

    #[test]
    fn repeated_eigenvalues_are_merged() {
        // P = I with uniform pi: a single distinct eigenvalue 1/3.
        let spec = SbmSpec::from_rows(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            &[1.0 / 3.0; 3],
        )
        .unwrap();
        let verdict = sbm_identification(&spec, &Tolerances::default()).unwrap();
        assert!(!verdict.identified);
        assert_eq!(verdict.witness, Some(Witness::TooFewDistinctEigenvalues));
    }

    #[test]
    fn relabeling_invariance() {
        let spec = healthy_k3();
        let perm = [2usize, 0, 1];
        let p2 = DMatrix::from_fn(3, 3, |i, j| spec.p[(perm[i], perm[j])]);
        let pi2 = DVector::from_fn(3, |i, _| spec.pi[perm[i]]);
        let spec2 = SbmSpec::new(p2, pi2).unwrap();
        let (e1, _) = sbm_spectrum(&spec);
        let (e2, _) = sbm_spectrum(&spec2);
        for (a, b) in e1.iter().zip(&e2) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let v1 = sbm_identification(&spec, &Tolerances::default()).unwrap();
        let v2 = sbm_identification(&spec2, &Tolerances::default()).unwrap();
        assert_eq!(v1.identified, v2.identified);
    }

    #[test]
    fn constant_kernel_moments_are_powers() {
        let grid = QuadGrid::uniform(100);
        let m = graphon_moments(&|_, _| 0.4f64, 4, &grid).unwrap();
        for (k, v) in m.iter().enumerate() {
            assert_relative_eq!(*v, 0.4f64.powi(k as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn sbm_moments_match_quadrature_and_spectrum() {
        let spec = healthy_k3();
        let exact = sbm_moments(&spec, 4);
        let grid = QuadGrid::blocked(&spec.breakpoints(), 200);
        let quad = graphon_moments(&|u, v| spec.kernel(u, v), 4, &grid).unwrap();
        let (eigs, ovs) = sbm_spectrum(&spec);
        let spectral = spectral_moments(&eigs, &ovs, 4);
        for k in 0..=4 {
            assert_relative_eq!(exact[k], quad[k], epsilon = 1e-10);
            assert_relative_eq!(exact[k], spectral[k], epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_one_kernel_hankel_is_singular() {
        let g = |u: f64| 0.5 + u;
        let grid = QuadGrid::uniform(400);
        let m = graphon_moments(&|u, v| g(u) * g(v), 4, &grid).unwrap();
        let hankel = DMatrix::from_fn(3, 3, |i, j| m[i + j]);
        let svd = hankel.svd(false, false);
        let smin = svd.singular_values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(smin < 1e-10 * smax, "smin {smin} smax {smax}");
    }

    #[test]
    fn degree_codegree_constant_dependent() {
        let grid = QuadGrid::uniform(300);
        let verdict = degree_codegree_check(&|_, _| 0.3f64, &grid, &Tolerances::default());
        assert!(!verdict.identified);
    }

    #[test]
    fn degree_codegree_additive_kernel() {
        // f(u, v) = u + v: g1(u) = u + 1/2, g2(u) = u + 7/12 = g1 + 1/12,
        // so {1, g1, g2} are linearly dependent despite g1 varying.
        let grid = QuadGrid::uniform(500);
        let ones = vec![1.0; grid.len()];
        let g1 = grid.apply_kernel(&|u: f64, v: f64| u + v, &ones);
        for (i, &u) in grid.nodes.iter().enumerate() {
            assert_relative_eq!(g1[i], u + 0.5, epsilon = 1e-10);
        }
        let verdict = degree_codegree_check(&|u, v| u + v, &grid, &Tolerances::default());
        assert!(!verdict.identified);
        assert!(verdict.min_gram_eig.unwrap() < 1e-8);
    }

    #[test]
    fn degree_codegree_agrees_with_spectral_for_blocks() {
        let spec = healthy_k3();
        let grid = QuadGrid::blocked(&spec.breakpoints(), 200);
        let verdict = degree_codegree_check(&|u, v| spec.kernel(u, v), &grid, &Tolerances::default());
        assert!(verdict.identified);
    }

    #[test]
    fn relevance_curvature_arithmetic() {
        let params = LisParams::default();
        let verdict = relevance_check(
            &IdentifySource::Sbm(&healthy_k3()),
            &params,
            &Tolerances::default(),
        )
        .unwrap();
        assert_relative_eq!(verdict.kappa.unwrap(), 2.4, epsilon = 1e-12);
        assert!(verdict.identified);
        assert!(verdict.min_sv_gamma_zw.unwrap() > 0.0);
    }

    #[test]
    fn relevance_kappa_zero_flagged() {
        let mut params = LisParams::default();
        // delta0 = -(alpha + mu beta) rho0 / mu makes kappa exactly 0.
        params.delta0 = -(params.alpha + params.mu * params.beta) * params.rho0 / params.mu;
        let verdict = relevance_check(
            &IdentifySource::Sbm(&healthy_k3()),
            &params,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!verdict.identified);
        assert_eq!(verdict.witness, Some(Witness::CurvatureZero));
    }

    #[test]
    fn perturbations_restore_identification() {
        let rate = perturbation_identified_rate(
            &disconnected_example(),
            1e-2,
            100,
            42,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(rate >= 0.95, "rate {rate}");
    }

    #[test]
    fn verdict_monotone_in_overlap_tolerance() {
        // Tightening tol_overlap can only lose eigenvalues, so identified
        // must be monotone non-increasing along an increasing tolerance
        // ladder; loosening never flips identified -> not-identified.
        let specs = [disconnected_example(), positive_counterexample(), healthy_k3()];
        let ladder: Vec<f64> = vec![1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1];
        for spec in &specs {
            let flags: Vec<bool> = ladder
                .iter()
                .map(|&t| {
                    sbm_identification(
                        spec,
                        &Tolerances {
                            overlap: t,
                            ..Default::default()
                        },
                    )
                    .unwrap()
                    .identified
                })
                .collect();
            for w in flags.windows(2) {
                assert!(w[0] || !w[1], "verdicts not monotone: {flags:?}");
            }
        }
    }
}
