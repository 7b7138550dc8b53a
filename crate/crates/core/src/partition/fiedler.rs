//! Fiedler vector of a weighted graph Laplacian `L = D - W`.
//!
//! The solver is a block preconditioned eigensolver (LOBPCG) working in the
//! complement of the constant vector. Small projected problems are solved
//! with cyclic Jacobi rotations. Only products with `L` touch the graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::components::connected_components;
use crate::graph::UnipartiteGraph;
use crate::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiedlerError {
    #[error("graph with {0} nodes is too small (need at least 3)")]
    TooSmall(usize),
    #[error("graph has {0} connected components; split by components first")]
    Disconnected(usize),
    #[error("no convergence after {iterations} operator applications (best residual {best_residual:e})")]
    NotConverged { best_residual: f64, iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiedlerOptions {
    /// Bound on `||L v - lambda v||` for a unit `v`; also the zero threshold
    /// used when reading signs.
    pub tol: f64,
    /// Budget of Laplacian applications.
    pub max_iter: usize,
    /// Number of eigenvector approximations iterated together.
    pub block_size: usize,
}

impl Default for FiedlerOptions {
    fn default() -> Self {
        FiedlerOptions {
            tol: 1e-8,
            max_iter: 10_000,
            block_size: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiedlerResult {
    /// Unit-norm, orthogonal to the all-ones vector, first entry with
    /// `|v_i| >= tol` positive.
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    pub residual: f64,
    /// Laplacian applications used.
    pub iterations: usize,
}

/// Weighted Laplacian held as adjacency plus degree.
#[derive(Debug, Clone)]
pub struct Laplacian {
    adjacency: CsrMatrix,
    degree: Vec<f64>,
}

impl Laplacian {
    pub fn from_graph(g: &UnipartiteGraph) -> Self {
        let n = g.node_count();
        let triplets: Vec<_> = g
            .edges()
            .iter()
            .flat_map(|e| [(e.a, e.b, e.weight), (e.b, e.a, e.weight)])
            .collect();
        Self::from_adjacency(CsrMatrix::from_triplets(n, n, &triplets))
    }

    /// Laplacian of the subgraph induced by `members` (sorted) over global
    /// adjacency lists; local index `i` is `members[i]`.
    pub(crate) fn induced(adj: &[Vec<(usize, f64)>], members: &[usize]) -> Self {
        let mut triplets = Vec::new();
        for (i, &node) in members.iter().enumerate() {
            for &(nb, w) in &adj[node] {
                if let Ok(j) = members.binary_search(&nb) {
                    triplets.push((i, j, w));
                }
            }
        }
        let n = members.len();
        Self::from_adjacency(CsrMatrix::from_triplets(n, n, &triplets))
    }

    fn from_adjacency(adjacency: CsrMatrix) -> Self {
        let degree = adjacency.row_sums();
        Laplacian { adjacency, degree }
    }

    pub fn dim(&self) -> usize {
        self.degree.len()
    }

    /// `y = L x`
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency.mul_vec_into(x, y);
        for i in 0..y.len() {
            y[i] = self.degree[i] * x[i] - y[i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues ascending and matching eigenvectors as
/// columns (`vectors[row][col]`).
pub(crate) fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = a.len();
    let mut v = vec![vec![0.0; k]; k];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let off: f64 = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..k)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (b, c) in basis.iter().zip(coeffs) {
        axpy(c, b, &mut out);
    }
    out
}

/// Fixes the global sign: the first entry with magnitude at least `tol` is
/// made positive.
fn canonical_sign(v: &mut [f64], tol: f64) {
    if let Some(&first) = v.iter().find(|x| x.abs() >= tol) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Fiedler vector of a connected graph with at least three nodes.
pub fn fiedler_vector(g: &UnipartiteGraph, opts: &FiedlerOptions) -> Result<FiedlerResult, FiedlerError> {
    if g.node_count() < 3 {
        return Err(FiedlerError::TooSmall(g.node_count()));
    }
    let comps = connected_components(g).count;
    if comps != 1 {
        return Err(FiedlerError::Disconnected(comps));
    }
    fiedler_of_laplacian(&Laplacian::from_graph(g), opts)
}

/// Vectors kept together with their images under `L`.
#[derive(Default)]
struct Span {
    v: Vec<Vec<f64>>,
    lv: Vec<Vec<f64>>,
}

impl Span {
    /// Orthogonalises `(x, lx)` against the constant vector and the span
    /// (two Gram–Schmidt passes, image updated alongside) and appends it
    /// unless it is numerically dependent.
    fn push(&mut self, mut x: Vec<f64>, mut lx: Vec<f64>) -> bool {
        match self.orthogonalize(&mut x, Some(&mut lx)) {
            Some(len) => {
                lx.iter_mut().for_each(|v| *v /= len);
                self.v.push(x);
                self.lv.push(lx);
                true
            }
            None => false,
        }
    }

    /// Orthonormal part of `x` outside the span and the constant vector,
    /// for vectors whose image is computed afterwards.
    fn complement(&self, mut x: Vec<f64>) -> Option<Vec<f64>> {
        self.orthogonalize(&mut x, None).map(|_| x)
    }

    fn orthogonalize(&self, x: &mut [f64], mut lx: Option<&mut Vec<f64>>) -> Option<f64> {
        let start = norm(x);
        if !(start > 0.0) {
            return None;
        }
        for _ in 0..2 {
            // L 1 = 0, so removing the mean leaves the image unchanged
            remove_mean(x);
            for (b, lb) in self.v.iter().zip(&self.lv) {
                let c = dot(b, x);
                axpy(-c, b, x);
                if let Some(lx) = lx.as_deref_mut() {
                    axpy(-c, lb, lx);
                }
            }
        }
        let len = norm(x);
        if len <= 1e-10 * start {
            return None;
        }
        x.iter_mut().for_each(|v| *v /= len);
        Some(len)
    }

    /// Appends `x` (already orthonormal to the span) with a fresh image.
    fn push_with_image(&mut self, x: Vec<f64>, lx: Vec<f64>) {
        self.v.push(x);
        self.lv.push(lx);
    }

    fn len(&self) -> usize {
        self.v.len()
    }
}

const REFRESH_EVERY: usize = 16;

/// Solver entry on an assembled Laplacian; the caller guarantees connectivity.
///
/// Locally optimal block preconditioned conjugate gradient on the complement
/// of the constant vector, with the inverse degree as preconditioner. Each
/// step runs Rayleigh–Ritz on the current block, the preconditioned residuals
/// and the previous search directions, and keeps the lowest Ritz pairs.
pub fn fiedler_of_laplacian(lap: &Laplacian, opts: &FiedlerOptions) -> Result<FiedlerResult, FiedlerError> {
    let n = lap.dim();
    if n < 3 {
        return Err(FiedlerError::TooSmall(n));
    }
    let block = opts.block_size.clamp(1, ((n - 1) / 3).max(1));
    let inv_degree: Vec<f64> = lap.degree.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1ed1e5);
    let mut matvecs = 0usize;
    let apply = |x: &[f64], matvecs: &mut usize| {
        let mut y = vec![0.0; n];
        lap.apply(x, &mut y);
        *matvecs += 1;
        y
    };

    let mut random = move || -> Vec<f64> { (0..n).map(|_| rng.random::<f64>() - 0.5).collect() };

    let mut x = Span::default();
    while x.len() < block {
        if let Some(v) = x.complement(random()) {
            let lv = apply(&v, &mut matvecs);
            x.push_with_image(v, lv);
        }
    }
    let mut theta: Vec<f64> = x.v.iter().zip(&x.lv).map(|(v, lv)| dot(v, lv)).collect();
    let mut p = Span::default();
    let mut best_residual = f64::INFINITY;
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps % REFRESH_EVERY == 0 {
            // images tracked through linear combinations drift; recompute
            for j in 0..x.len() {
                x.lv[j] = apply(&x.v[j], &mut matvecs);
                theta[j] = dot(&x.v[j], &x.lv[j]);
            }
            for j in 0..p.len() {
                p.lv[j] = apply(&p.v[j], &mut matvecs);
            }
        }
        let residuals: Vec<Vec<f64>> = (0..x.len())
            .map(|j| {
                let mut r = x.lv[j].clone();
                axpy(-theta[j], &x.v[j], &mut r);
                r
            })
            .collect();
        let estimate = norm(&residuals[0]);
        

        if estimate <= opts.tol {
            let mut v = x.v[0].clone();
            remove_mean(&mut v);
            let len = norm(&v);
            v.iter_mut().for_each(|e| *e /= len);
            let mut lv = apply(&v, &mut matvecs);
            let eigenvalue = dot(&v, &lv);
            axpy(-eigenvalue, &v, &mut lv);
            let residual = norm(&lv);
            best_residual = best_residual.min(residual);
            if residual <= opts.tol {
                canonical_sign(&mut v, opts.tol);
                return Ok(FiedlerResult {
                    vector: v,
                    eigenvalue,
                    residual,
                    iterations: matvecs,
                });
            }
            // tracked images drifted; refresh them
            for j in 0..x.len() {
                x.lv[j] = apply(&x.v[j], &mut matvecs);
            }
            for j in 0..p.len() {
                p.lv[j] = apply(&p.v[j], &mut matvecs);
            }
        } else {
            best_residual = best_residual.min(estimate);
        }
        if matvecs >= opts.max_iter {
            return Err(FiedlerError::NotConverged {
                best_residual,
                iterations: matvecs,
            });
        }

        let mut basis = Span { v: x.v.clone(), lv: x.lv.clone() };
        for r in &residuals {
            let w: Vec<f64> = r.iter().zip(&inv_degree).map(|(a, b)| a * b).collect();
            if let Some(w) = basis.complement(w) {
                let lw = apply(&w, &mut matvecs);
                basis.push_with_image(w, lw);
            }
        }
        for (pv, plv) in p.v.into_iter().zip(p.lv) {
            basis.push(pv, plv);
        }
        if basis.len() == x.len() {
            // nothing new to search; perturb deterministically
            if let Some(c) = basis.complement(random()) {
                let lc = apply(&c, &mut matvecs);
                basis.push_with_image(c, lc);
            }
        }

        let k = basis.len();
        let h: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| 0.5 * (dot(&basis.v[i], &basis.lv[j]) + dot(&basis.v[j], &basis.lv[i])))
                    .collect()
            })
            .collect();
        let (values, y) = symmetric_eigen(h);
        let b = x.len().min(k);
        let old = x.len();
        let mut next_x = Span::default();
        let mut next_p = Span::default();
        for c in 0..b {
            next_x.v.push(combine(&basis.v, (0..k).map(|i| y[i][c]), n));
            next_x.lv.push(combine(&basis.lv, (0..k).map(|i| y[i][c]), n));
            if k > old {
                let pv = combine(&basis.v[old..], (old..k).map(|i| y[i][c]), n);
                let plv = combine(&basis.lv[old..], (old..k).map(|i| y[i][c]), n);
                next_p.push(pv, plv);
            }
        }
        theta = values[..b].to_vec();
        x = next_x;
        p = next_p;
    }
}
