//! Graph ensembles and structural statistics.
//!
//! All graphs are simple, undirected, and binary: symmetric adjacency,
//! zero diagonal. Storage is CSR with both directions of every edge so
//! that row iteration and matrix-vector products are cache-friendly.
//! Generation is deterministic given the spec and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sparse symmetric binary adjacency structure.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
}

impl Graph {
    /// Builds a graph from undirected edges `(i, j)` with `i < j`.
    ///
    /// Rejects self-loops, out-of-range endpoints, and duplicates.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut directed: Vec<(u32, u32)> = Vec::with_capacity(edges.len() * 2);
        for &(i, j) in edges {
            if i >= j {
                return Err(Error::InvalidSpec(format!(
                    "edge ({i}, {j}) must satisfy i < j"
                )));
            }
            if j as usize >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            directed.push((i, j));
            directed.push((j, i));
        }
        directed.sort_unstable();
        if directed.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("duplicate edge".into()));
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in &directed {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = directed.into_iter().map(|(_, j)| j).collect();
        Ok(Graph { n, row_ptr, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.cols.len() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.cols.len() as f64 / self.n as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).min().unwrap_or(0)
    }

    /// Sorted neighbor list of node `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Undirected edges as `(i, j)` pairs with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| (i as u32) < j)
                .map(move |&j| (i as u32, j))
        })
    }

    /// `out = A v`.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for &j in self.neighbors(i) {
                acc += v[j as usize];
            }
            out[i] = acc;
        }
    }

    /// Checks the structural invariants: symmetry, zero diagonal, sorted
    /// rows without duplicates. Degrees equal row lengths by construction.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            let row = self.neighbors(i);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSpec(format!("row {i} unsorted or duplicated")));
            }
            for &j in row {
                if j as usize == i {
                    return Err(Error::InvalidSpec(format!("self-loop at {i}")));
                }
                if self.neighbors(j as usize).binary_search(&(i as u32)).is_err() {
                    return Err(Error::InvalidSpec(format!("asymmetric edge ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Number of connected components (union-find).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j) in self.edges() {
            let (a, b) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.n)
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }

    /// Serializes to the edge-list text format: header `n <count>`, then
    /// one `i j` pair per undirected edge, 0-indexed, `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (i, j) in self.edges() {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    /// Parses the edge-list text format produced by [`Graph::to_edge_list`].
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Format("empty edge-list file".into()))?;
        let mut parts = header.split_whitespace();
        let n = match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(count), None) => count.parse::<usize>().map_err(|_| {
                Error::Format(format!("line 1: bad node count `{count}`"))
            })?,
            _ => {
                return Err(Error::Format(
                    "line 1: expected header `n <count>`".into(),
                ))
            }
        };
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (i, j) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => {
                    let i = a.parse::<u32>().map_err(|_| {
                        Error::Format(format!("line {}: bad endpoint `{a}`", idx + 1))
                    })?;
                    let j = b.parse::<u32>().map_err(|_| {
                        Error::Format(format!("line {}: bad endpoint `{b}`", idx + 1))
                    })?;
                    (i, j)
                }
                _ => {
                    return Err(Error::Format(format!(
                        "line {}: expected `i j`",
                        idx + 1
                    )))
                }
            };
            edges.push((i, j));
        }
        Graph::from_edges(n, &edges)
    }
}

/// Which random-graph family to draw from.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleSpec {
    ErdosRenyi { n: usize, d: f64, seed: u64 },
    BipartiteUnion { n: usize, d: usize },
    CliqueUnion { n: usize, d: usize },
    Sbm(SbmEnsemble),
    Graphon(GraphonEnsemble),
}

/// Stochastic block model sampling payload.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmEnsemble {
    /// Symmetric K x K connectivity matrix with entries in [0, 1].
    pub p: Vec<Vec<f64>>,
    /// Community probabilities, summing to 1.
    pub pi: Vec<f64>,
    /// Sparsity factor; edge probability is `p_n * P[c_i][c_j]`.
    pub p_n: f64,
    pub n: usize,
    pub seed: u64,
}

/// Graphon sampling payload; the kernel is supplied as a closure at call
/// time, so this spec only carries the scalar knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonEnsemble {
    pub p_n: f64,
    pub n: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    /// Draws the graph described by the spec. Graphon specs need the
    /// kernel and must go through [`gen_graphon`] directly.
    pub fn generate(&self) -> Result<Graph> {
        match self {
            EnsembleSpec::ErdosRenyi { n, d, seed } => gen_erdos_renyi(*n, *d, *seed),
            EnsembleSpec::BipartiteUnion { n, d } => gen_bipartite_union(*n, *d),
            EnsembleSpec::CliqueUnion { n, d } => gen_clique_union(*n, *d),
            EnsembleSpec::Sbm(s) => gen_sbm(&s.p, &s.pi, s.p_n, s.n, s.seed),
            EnsembleSpec::Graphon(_) => Err(Error::InvalidSpec(
                "graphon ensembles need a kernel; call gen_graphon".into(),
            )),
        }
    }
}

/// Emits the indices of a Bernoulli(p) subset of `0..total`, ascending.
///
/// Uses geometric gap skipping, so the cost is proportional to the number
/// of successes rather than to `total`.
fn sample_bernoulli_indices(
    rng: &mut ChaCha8Rng,
    p: f64,
    total: u64,
    mut emit: impl FnMut(u64),
) {
    if total == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for t in 0..total {
            emit(t);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut t: u64 = 0;
    loop {
        let u: f64 = rng.gen::<f64>();
        // Number of failures before the next success.
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (total - t) as f64 {
            return;
        }
        t += skip as u64;
        emit(t);
        t += 1;
        if t >= total {
            return;
        }
    }
}

/// Maps ascending linear indices over the strict upper triangle of an
/// `n x n` matrix back to `(i, j)` pairs, `i < j`.
struct UpperTriangleCursor {
    i: u64,
    row_start: u64,
    row_len: u64,
    n: u64,
}

impl UpperTriangleCursor {
    fn new(n: usize) -> Self {
        let n = n as u64;
        UpperTriangleCursor {
            i: 0,
            row_start: 0,
            row_len: n.saturating_sub(1),
            n,
        }
    }

    fn locate(&mut self, t: u64) -> (u32, u32) {
        while t >= self.row_start + self.row_len {
            self.row_start += self.row_len;
            self.i += 1;
            self.row_len = self.n - 1 - self.i;
        }
        let j = self.i + 1 + (t - self.row_start);
        (self.i as u32, j as u32)
    }
}

/// Erdős–Rényi graph with expected degree `d`: each unordered pair is
/// connected independently with probability `d / (n - 1)`.
pub fn gen_erdos_renyi(n: usize, d: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("need n >= 2, got {n}")));
    }
    if !(d >= 1.0 && d < n as f64) {
        return Err(Error::InvalidSpec(format!(
            "expected degree must satisfy 1 <= d < n, got d = {d}, n = {n}"
        )));
    }
    let p = d / (n as f64 - 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = (n as u64) * (n as u64 - 1) / 2;
    let mut cursor = UpperTriangleCursor::new(n);
    let mut edges = Vec::new();
    sample_bernoulli_indices(&mut rng, p, total, |t| {
        edges.push(cursor.locate(t));
    });
    Graph::from_edges(n, &edges)
}

/// Appends all edges of a complete bipartite block between `left` and
/// `right` node ranges.
fn push_bipartite_block(edges: &mut Vec<(u32, u32)>, left: std::ops::Range<u32>, right: std::ops::Range<u32>) {
    for i in left {
        for j in right.clone() {
            edges.push((i.min(j), i.max(j)));
        }
    }
}

/// Disjoint union of complete bipartite d-regular blocks `K_{d,d}`.
///
/// When the block size `2d` does not divide `n`, the residual nodes form a
/// final smaller balanced complete bipartite block; a single leftover node
/// is absorbed into the last block instead (so no node is ever isolated).
pub fn gen_bipartite_union(n: usize, d: usize) -> Result<Graph> {
    if d == 0 || 2 * d > n {
        return Err(Error::InvalidSpec(format!(
            "bipartite union needs 1 <= 2d <= n, got d = {d}, n = {n}"
        )));
    }
    let block = 2 * d;
    let mut full_blocks = n / block;
    let mut rem = n % block;
    if rem == 1 {
        // A lone residual node would be isolated; widen the last block.
        full_blocks -= 1;
        rem += block;
    }
    let mut edges = Vec::new();
    let mut base = 0u32;
    for _ in 0..full_blocks {
        push_bipartite_block(&mut edges, base..base + d as u32, base + d as u32..base + block as u32);
        base += block as u32;
    }
    if rem > 0 {
        let left = rem / 2;
        push_bipartite_block(
            &mut edges,
            base..base + left as u32,
            base + left as u32..base + rem as u32,
        );
    }
    Graph::from_edges(n, &edges)
}

/// Disjoint union of complete graphs on `d + 1` nodes, so that every
/// full-block node has degree exactly `d`.
///
/// Residual nodes form one smaller complete block; a single leftover node
/// is absorbed into the last block.
pub fn gen_clique_union(n: usize, d: usize) -> Result<Graph> {
    if d == 0 || d + 1 > n {
        return Err(Error::InvalidSpec(format!(
            "clique union needs 1 <= d + 1 <= n, got d = {d}, n = {n}"
        )));
    }
    let block = d + 1;
    let mut full_blocks = n / block;
    let mut rem = n % block;
    if rem == 1 {
        full_blocks -= 1;
        rem += block;
    }
    let mut edges = Vec::new();
    let mut base = 0u32;
    let push_clique = |edges: &mut Vec<(u32, u32)>, start: u32, size: usize| {
        for a in 0..size as u32 {
            for b in a + 1..size as u32 {
                edges.push((start + a, start + b));
            }
        }
    };
    for _ in 0..full_blocks {
        push_clique(&mut edges, base, block);
        base += block as u32;
    }
    if rem > 0 {
        push_clique(&mut edges, base, rem);
    }
    Graph::from_edges(n, &edges)
}

fn validate_sbm_inputs(p: &[Vec<f64>], pi: &[f64], p_n: f64) -> Result<usize> {
    let k = p.len();
    if k == 0 || pi.len() != k {
        return Err(Error::InvalidSpec(
            "block matrix and membership vector sizes disagree".into(),
        ));
    }
    for row in p {
        if row.len() != k {
            return Err(Error::InvalidSpec("block matrix is not square".into()));
        }
        for &v in row {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSpec(format!(
                    "block matrix entry {v} outside [0, 1]"
                )));
            }
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            if (p[a][b] - p[b][a]).abs() > 1e-12 {
                return Err(Error::InvalidSpec("block matrix is not symmetric".into()));
            }
        }
    }
    let sum: f64 = pi.iter().sum();
    if pi.iter().any(|&x| x < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(
            "membership probabilities must be non-negative and sum to 1".into(),
        ));
    }
    let pmax = p
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(0.0f64, f64::max);
    if p_n <= 0.0 || p_n * pmax > 1.0 + 1e-12 {
        return Err(Error::InvalidSpec(format!(
            "sparsity p_n = {p_n} makes edge probabilities exceed 1"
        )));
    }
    Ok(k)
}

/// Stochastic block model: memberships i.i.d. from `pi`, conditional edge
/// probability `p_n * P[c_i][c_j]`.
pub fn gen_sbm(p: &[Vec<f64>], pi: &[f64], p_n: f64, n: usize, seed: u64) -> Result<Graph> {
    let k = validate_sbm_inputs(p, pi, p_n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Memberships in node order.
    let mut cum = vec![0.0f64; k];
    let mut acc = 0.0;
    for (c, &w) in cum.iter_mut().zip(pi.iter()) {
        acc += w;
        *c = acc;
    }
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for i in 0..n {
        let u: f64 = rng.gen();
        let c = cum.partition_point(|&edge| edge < u).min(k - 1);
        members[c].push(i as u32);
    }
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a..k {
            let prob = (p_n * p[a][b]).min(1.0);
            if a == b {
                let m = members[a].len() as u64;
                let total = m * m.saturating_sub(1) / 2;
                let list = &members[a];
                let mut cursor = UpperTriangleCursor::new(list.len());
                sample_bernoulli_indices(&mut rng, prob, total, |t| {
                    let (x, y) = cursor.locate(t);
                    let (i, j) = (list[x as usize], list[y as usize]);
                    edges.push((i.min(j), i.max(j)));
                });
            } else {
                let (la, lb) = (&members[a], &members[b]);
                let total = la.len() as u64 * lb.len() as u64;
                let w = lb.len() as u64;
                sample_bernoulli_indices(&mut rng, prob, total, |t| {
                    let i = la[(t / w) as usize];
                    let j = lb[(t % w) as usize];
                    edges.push((i.min(j), i.max(j)));
                });
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Samples a graph from a graphon kernel: latent positions `U_i` i.i.d.
/// uniform, independent edges with probability `p_n * f(U_i, U_j)`.
///
/// Returns the graph together with the number of probabilities clipped to
/// 1; shipped experiment configurations must keep that count at zero.
pub fn gen_graphon<F>(f: F, p_n: f64, n: usize, seed: u64) -> Result<(Graph, u64)>
where
    F: Fn(f64, f64) -> f64,
{
    if n < 2 {
        return Err(Error::InvalidSpec(format!("need n >= 2, got {n}")));
    }
    if p_n <= 0.0 {
        return Err(Error::InvalidSpec(format!("sparsity must be positive, got {p_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let mut clipped = 0u64;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let val = f(u[i], u[j]);
            if val < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "graphon returned negative value {val} at ({}, {})",
                    u[i], u[j]
                )));
            }
            let mut prob = p_n * val;
            if prob > 1.0 {
                prob = 1.0;
                clipped += 1;
            }
            if rng.gen::<f64>() < prob {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok((Graph::from_edges(n, &edges)?, clipped))
}

/// Closed-walk counts and the global clustering coefficient.
///
/// Conventions: `c3 = Tr(A^3)` (oriented closed 3-walks, six per
/// triangle); `c4 = Tr(A^4) - sum_i d_i`, i.e. closed 4-walks minus pure
/// single-edge back-and-forth walks, so degenerate three-node 4-walks are
/// included; `open_triples = sum_i d_i (d_i - 1) - c3` counts ordered
/// connected triples whose endpoints are not adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleCensus {
    pub c3: u64,
    pub c4: u64,
    pub open_triples: u64,
}

impl CycleCensus {
    /// Global clustering coefficient `c3 / (c3 + open_triples)`, zero for
    /// graphs without connected triples.
    pub fn clustering(&self) -> f64 {
        let denom = self.c3 + self.open_triples;
        if denom == 0 {
            0.0
        } else {
            self.c3 as f64 / denom as f64
        }
    }
}

/// Computes the cycle census in `O(sum_i d_i^2)` time via per-row 2-walk
/// counting with a scratch array.
pub fn cycle_census(g: &Graph) -> CycleCensus {
    let n = g.n();
    let mut counts = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut tr_a3: u64 = 0;
    let mut tr_a4: u64 = 0;
    for i in 0..n {
        for &j in g.neighbors(i) {
            for &k in g.neighbors(j as usize) {
                if counts[k as usize] == 0 {
                    touched.push(k);
                }
                counts[k as usize] += 1;
            }
        }
        // counts[k] is now (A^2)_{ik}.
        for &k in &touched {
            let c = counts[k as usize] as u64;
            tr_a4 += c * c;
        }
        for &j in g.neighbors(i) {
            tr_a3 += counts[j as usize] as u64;
        }
        for &k in &touched {
            counts[k as usize] = 0;
        }
        touched.clear();
    }
    let sum_deg: u64 = (0..n).map(|i| g.degree(i) as u64).sum();
    let ordered_paths: u64 = (0..n)
        .map(|i| {
            let d = g.degree(i) as u64;
            d * d.saturating_sub(1)
        })
        .sum();
    CycleCensus {
        c3: tr_a3,
        c4: tr_a4 - sum_deg,
        open_triples: ordered_paths - tr_a3,
    }
}

/// Largest adjacency eigenvalue by shifted power iteration.
///
/// The iteration runs on `A + Delta I` (`Delta` = max degree) so that
/// bipartite spectra, whose extreme eigenvalues come in +/- pairs, still
/// converge. The returned estimate carries a certified relative error
/// below `tol` via the symmetric residual bound.
pub fn spectral_radius(g: &Graph, tol: f64) -> Result<f64> {
    let n = g.n();
    if n == 0 || g.num_edges() == 0 {
        return Ok(0.0);
    }
    let shift = g.max_degree() as f64;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = vec![0.0; n];
    let max_iter = 50_000usize;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for iter in 0..max_iter {
        g.matvec(&v, &mut av);
        lambda = v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>();
        residual = v
            .iter()
            .zip(&av)
            .map(|(vi, avi)| (avi - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            return Ok(lambda);
        }
        // Next iterate: (A + shift I) v, normalized.
        let mut norm = 0.0;
        for i in 0..n {
            av[i] += shift * v[i];
            norm += av[i] * av[i];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        for i in 0..n {
            v[i] = av[i] / norm;
        }
        if iter == max_iter - 1 {
            break;
        }
    }
    Err(Error::NonConvergence {
        what: format!("power iteration (last estimate {lambda:.6})"),
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn k22() -> Graph {
        gen_bipartite_union(4, 2).unwrap()
    }

    #[test]
    fn er_with_p_one_is_complete() {
        let g = gen_erdos_renyi(2, 1.0, 7).unwrap();
        assert_eq!(g.num_edges(), 1);
        let g = gen_erdos_renyi(5, 4.0, 7).unwrap();
        assert_eq!(g.num_edges(), 10);
    }

    #[test]
    fn er_rejects_degree_at_least_n() {
        assert!(gen_erdos_renyi(10, 10.0, 0).is_err());
        assert!(gen_erdos_renyi(10, 0.5, 0).is_err());
    }

    #[test]
    fn er_mean_degree_matches_target() {
        // Average of the per-graph mean degree over seeds; the binomial
        // SD of one graph's mean degree at n = 100, d = 10 is ~0.424.
        let seeds = 30u64;
        let mut avg = 0.0;
        for s in 0..seeds {
            avg += gen_erdos_renyi(100, 10.0, s).unwrap().mean_degree();
        }
        avg /= seeds as f64;
        let se = 0.424 / (seeds as f64).sqrt();
        assert!((avg - 10.0).abs() < 3.0 * se, "avg = {avg}");
    }

    #[test]
    fn er_generation_is_deterministic() {
        let a = gen_erdos_renyi(200, 8.0, 99).unwrap();
        let b = gen_erdos_renyi(200, 8.0, 99).unwrap();
        assert_eq!(a, b);
        let c = gen_erdos_renyi(200, 8.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bipartite_union_block_structure() {
        let g = k22();
        assert_eq!(g.degrees(), vec![2, 2, 2, 2]);
        assert_eq!(cycle_census(&g).c3, 0);

        // Residual block: n = 10, d = 2 -> two K_{2,2} plus one K_{1,1}.
        let g = gen_bipartite_union(10, 2).unwrap();
        assert_eq!(g.num_edges(), 4 + 4 + 1);
        assert_eq!(g.min_degree(), 1);

        // Lone remainder node is absorbed: n = 9, d = 2 -> K_{2,2} + K_{3,2}.
        let g = gen_bipartite_union(9, 2).unwrap();
        assert_eq!(g.min_degree(), 2);
        g.validate().unwrap();
        assert!(gen_bipartite_union(3, 2).is_err());
    }

    #[test]
    fn clique_union_block_structure() {
        let g = gen_clique_union(3, 2).unwrap();
        assert_eq!(cycle_census(&g).c3, 6);
        let g = gen_clique_union(6, 2).unwrap();
        assert_eq!(cycle_census(&g).c3, 12);
        // n = 7, d = 2: two K_3 would leave one node isolated, so the
        // last block widens to K_4.
        let g = gen_clique_union(7, 2).unwrap();
        assert_eq!(g.min_degree(), 2);
        assert_eq!(g.max_degree(), 3);
        assert!(gen_clique_union(2, 2).is_err());
    }

    #[test]
    fn census_on_k22_and_path() {
        // Frozen from the brute-force walk enumerator: Tr(A^4) = 32 on
        // K_{2,2}, minus sum of degrees 8.
        let census = cycle_census(&k22());
        assert_eq!(census.c3, 0);
        assert_eq!(census.c4, 24);
        assert_eq!(census.clustering(), 0.0);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let census = cycle_census(&path);
        assert_eq!(census.c3, 0);
        assert_eq!(census.open_triples, 2);
        assert_eq!(census.clustering(), 0.0);

        let census = cycle_census(&k3());
        assert_eq!(census.c3, 6);
        assert_eq!(census.clustering(), 1.0);
    }

    #[test]
    fn sbm_all_ones_matches_er_density() {
        let n = 400;
        let d = 8.0;
        let p = vec![vec![1.0]];
        let pi = vec![1.0];
        let mut avg = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            avg += gen_sbm(&p, &pi, d / (n as f64 - 1.0), n, s).unwrap().mean_degree();
        }
        avg /= seeds as f64;
        assert!((avg - d).abs() < 0.3, "avg = {avg}");
    }

    #[test]
    fn sbm_block_densities() {
        // Three balanced blocks; within-block density p_n, across 0.25 p_n.
        let n = 600;
        let p = vec![
            vec![1.0, 0.25, 0.25],
            vec![0.25, 1.0, 0.25],
            vec![0.25, 0.25, 1.0],
        ];
        let pi = vec![1.0 / 3.0; 3];
        let p_n = 0.05;
        let mut within = 0.0f64;
        let mut within_pairs = 0.0f64;
        let seeds = 10;
        for s in 0..seeds {
            let g = gen_sbm(&p, &pi, p_n, n, 1000 + s).unwrap();
            // Estimate overall edge count against its expectation instead
            // of reconstructing memberships: E[density] = p_n * pi' P pi.
            within += g.num_edges() as f64;
            within_pairs += (n * (n - 1) / 2) as f64;
        }
        let expected = p_n * 0.5; // pi' P pi = (3*1 + 6*0.25)/9 = 0.5
        let got = within / within_pairs;
        let sd = (expected * (1.0 - expected) / within_pairs).sqrt();
        assert!((got - expected).abs() < 3.0 * sd, "got {got}, want {expected}");
    }

    #[test]
    fn sbm_disconnected_example_splits() {
        // Block 1 never connects to blocks 2 and 3.
        let p = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ];
        let pi = vec![1.0 / 3.0; 3];
        let g = gen_sbm(&p, &pi, 0.5, 300, 5).unwrap();
        assert!(g.connected_components() >= 2);
    }

    #[test]
    fn sbm_validation_errors() {
        assert!(gen_sbm(&[vec![1.2]], &[1.0], 0.5, 10, 0).is_err());
        assert!(gen_sbm(&[vec![1.0]], &[0.7], 0.5, 10, 0).is_err());
        assert!(gen_sbm(&[vec![1.0]], &[1.0], 1.5, 10, 0).is_err());
    }

    #[test]
    fn graphon_constant_matches_er_scale() {
        let n = 300;
        let mut avg = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            let (g, clipped) = gen_graphon(|_, _| 1.0, 8.0 / n as f64, n, s).unwrap();
            assert_eq!(clipped, 0);
            avg += g.mean_degree();
        }
        avg /= seeds as f64;
        // Self-loop convention differs from ER by a factor (n-1)/n.
        assert!((avg - 8.0 * 299.0 / 300.0).abs() < 0.4, "avg = {avg}");
    }

    #[test]
    fn graphon_negative_kernel_rejected() {
        assert!(gen_graphon(|u, v| u - v, 0.5, 16, 3).is_err());
    }

    #[test]
    fn graphon_clipping_is_counted() {
        let (_, clipped) = gen_graphon(|_, _| 2.0, 1.0, 16, 3).unwrap();
        assert_eq!(clipped, 16 * 15 / 2);
    }

    #[test]
    fn spectral_radius_closed_forms() {
        assert!((spectral_radius(&k3(), 1e-10).unwrap() - 2.0).abs() < 1e-8);
        let g = gen_bipartite_union(8, 4).unwrap();
        assert!((spectral_radius(&g, 1e-10).unwrap() - 4.0).abs() < 1e-8);
        let empty = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(spectral_radius(&empty, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_erdos_renyi(50, 5.0, 11).unwrap();
        let text = g.to_edge_list();
        let back = Graph::from_edge_list(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_parse_errors_name_lines() {
        let err = Graph::from_edge_list("bogus\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        let err = Graph::from_edge_list("n 4\n0 1\nx y\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }
}
